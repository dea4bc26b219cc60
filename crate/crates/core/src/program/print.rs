use std::fmt::Write;

use super::{AtomId, Program, Signature};

fn body(signature: &Signature, positive: &[AtomId], negative: &[AtomId]) -> String {
    let mut literals: Vec<(AtomId, bool)> = positive
        .iter()
        .map(|&a| (a, false))
        .chain(negative.iter().map(|&a| (a, true)))
        .collect();
    literals.sort();
    literals
        .iter()
        .map(|&(a, negated)| {
            if negated {
                format!("not {}", signature.name(a))
            } else {
                signature.name(a).to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Canonical text: one statement per line in stored order, literals sorted
/// by atom id. Re-parsing the output yields the same program.
pub fn print(program: &Program) -> String {
    let sig = program.signature();
    let mut lines: Vec<String> = Vec::with_capacity(program.rules().len() + program.weak_constraints().len());
    let mut weak = program.weak_positions().peekable();
    let mut emit_weak_until = |upto: usize, lines: &mut Vec<String>| {
        while let Some((_, w)) = weak.next_if(|&(at, _)| at <= upto) {
            lines.push(format!(":~ {}.", body(sig, w.positive_body(), w.negative_body())));
        }
    };
    for (index, rule) in program.rules().iter().enumerate() {
        emit_weak_until(index, &mut lines);
        let head = rule
            .head()
            .iter()
            .map(|&a| sig.name(a))
            .collect::<Vec<_>>()
            .join(" | ");
        let mut line = head;
        if !rule.is_fact() {
            if !line.is_empty() {
                line.push(' ');
            }
            let _ = write!(line, ":- {}", body(sig, rule.positive_body(), rule.negative_body()));
        }
        line.push('.');
        lines.push(line);
    }
    emit_weak_until(usize::MAX, &mut lines);
    lines.join("\n")
}
