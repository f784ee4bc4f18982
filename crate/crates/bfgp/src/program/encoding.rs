//! Fixed-width bit-vector codec for programs. Each interior line owns one
//! action slot per table entry, one transition slot per legal goto target,
//! and four proposition slots (one per flag feature); the three groups are
//! laid out as global segments in that order. The final `end` line is
//! implicit and contributes no bits.

use crate::model::ActionId;
use crate::program::{Feature, PlanningProgram, ProgramError, ProgramLine};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramEncoding {
    pub n: usize,
    pub action_count: usize,
    pub bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("program has {n} lines; at least two are required")]
    TooShort { n: usize },
    #[error("line {line} uses action {action} but the table has {action_count} entries")]
    ActionOutOfRange { line: usize, action: usize, action_count: usize },
    #[error("bit vector has {got} bits, expected {expected} for n={n}, |A|={action_count}")]
    LengthMismatch { got: usize, expected: usize, n: usize, action_count: usize },
    #[error("line {line} decodes to an inconsistent slot combination: {detail}")]
    MalformedLine { line: usize, detail: String },
    #[error("decoded line vector is ill-formed: {0}")]
    IllFormed(#[from] ProgramError),
    #[error("encodings have different shapes ({a} vs {b} bits)")]
    ShapeMismatch { a: usize, b: usize },
}

/// Total bit width for an `n`-line program over `action_count` actions:
/// `(n - 1) * (action_count + (n - 2) + 4)`.
pub fn bit_len(n: usize, action_count: usize) -> usize {
    (n - 1) * (action_count + (n - 2) + 4)
}

/// Transition slot for goto target `t` on line `i`: targets before the line
/// keep their index, targets past the fall-through shift down by two.
fn transition_slot(line: usize, target: usize) -> usize {
    if target < line {
        target
    } else {
        target - 2
    }
}

fn slot_target(line: usize, slot: usize) -> usize {
    if slot < line {
        slot
    } else {
        slot + 2
    }
}

pub fn encode(program: &PlanningProgram, action_count: usize) -> Result<ProgramEncoding, CodecError> {
    let n = program.len();
    if n < 2 {
        return Err(CodecError::TooShort { n });
    }
    let interior = n - 1;
    let action_base = 0;
    let transition_base = interior * action_count;
    let proposition_base = transition_base + interior * (n - 2);
    let mut bits = vec![false; bit_len(n, action_count)];
    for (i, line) in program.lines()[..interior].iter().enumerate() {
        match *line {
            ProgramLine::Undefined => {}
            ProgramLine::Action(ActionId(id)) => {
                let id = id as usize;
                if id >= action_count {
                    return Err(CodecError::ActionOutOfRange { line: i, action: id, action_count });
                }
                bits[action_base + i * action_count + id] = true;
            }
            ProgramLine::Goto { target, feature } => {
                bits[transition_base + i * (n - 2) + transition_slot(i, target)] = true;
                bits[proposition_base + i * 4 + feature.index()] = true;
            }
            ProgramLine::End => unreachable!("interior end lines are rejected at construction"),
        }
    }
    Ok(ProgramEncoding { n, action_count, bits })
}

pub fn decode(encoding: &ProgramEncoding) -> Result<PlanningProgram, CodecError> {
    let ProgramEncoding { n, action_count, bits } = encoding;
    let (n, action_count) = (*n, *action_count);
    if n < 2 {
        return Err(CodecError::TooShort { n });
    }
    let expected = bit_len(n, action_count);
    if bits.len() != expected {
        return Err(CodecError::LengthMismatch { got: bits.len(), expected, n, action_count });
    }
    let interior = n - 1;
    let transition_base = interior * action_count;
    let proposition_base = transition_base + interior * (n - 2);
    let mut lines = Vec::with_capacity(n);
    for i in 0..interior {
        let actions: Vec<usize> = (0..action_count)
            .filter(|a| bits[i * action_count + a])
            .collect();
        let transitions: Vec<usize> = (0..n - 2)
            .filter(|s| bits[transition_base + i * (n - 2) + s])
            .collect();
        let propositions: Vec<usize> = (0..4)
            .filter(|p| bits[proposition_base + i * 4 + p])
            .collect();
        let malformed = |detail: String| CodecError::MalformedLine { line: i, detail };
        if actions.len() > 1 {
            return Err(malformed(format!("{} action slots set", actions.len())));
        }
        if transitions.len() > 1 {
            return Err(malformed(format!("{} transition slots set", transitions.len())));
        }
        if propositions.len() > 1 {
            return Err(malformed(format!("{} proposition slots set", propositions.len())));
        }
        let line = match (actions.first(), transitions.first(), propositions.first()) {
            (None, None, None) => ProgramLine::Undefined,
            (Some(&a), None, None) => ProgramLine::Action(ActionId(a as u16)),
            (None, Some(&s), Some(&p)) => ProgramLine::Goto {
                target: slot_target(i, s),
                feature: Feature::from_index(p).expect("proposition index below four"),
            },
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(malformed("action and goto slots both set".to_string()))
            }
            (None, Some(_), None) => {
                return Err(malformed("transition slot set without a proposition".to_string()))
            }
            (None, None, Some(_)) => {
                return Err(malformed("proposition slot set without a transition".to_string()))
            }
        };
        lines.push(line);
    }
    lines.push(ProgramLine::End);
    Ok(PlanningProgram::from_lines(lines)?)
}

/// Number of differing bits between two same-shape encodings.
pub fn hamming(a: &ProgramEncoding, b: &ProgramEncoding) -> Result<usize, CodecError> {
    if a.bits.len() != b.bits.len() || a.n != b.n || a.action_count != b.action_count {
        return Err(CodecError::ShapeMismatch { a: a.bits.len(), b: b.bits.len() });
    }
    Ok(a.bits.iter().zip(&b.bits).filter(|(x, y)| x != y).count())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_width_matches_closed_form() {
        assert_eq!(bit_len(5, 10), 68);
        assert_eq!(bit_len(2, 3), 1 * (3 + 0 + 4));
    }

    #[test]
    fn empty_program_encodes_to_zeroes() {
        let enc = encode(&PlanningProgram::empty(5), 10).unwrap();
        assert_eq!(enc.bits.len(), 68);
        assert!(enc.bits.iter().all(|b| !b));
        assert_eq!(decode(&enc).unwrap(), PlanningProgram::empty(5));
    }

    #[test]
    fn action_sets_one_bit_and_goto_sets_two() {
        let base = encode(&PlanningProgram::empty(5), 10).unwrap();
        let with_action = PlanningProgram::empty(5).with_line(2, ProgramLine::Action(ActionId(7)));
        let enc = encode(&with_action, 10).unwrap();
        assert_eq!(hamming(&base, &enc).unwrap(), 1);
        assert_eq!(decode(&enc).unwrap(), with_action);

        let with_goto =
            PlanningProgram::empty(5).with_line(3, ProgramLine::Goto { target: 0, feature: Feature::NotZC });
        let enc = encode(&with_goto, 10).unwrap();
        assert_eq!(hamming(&base, &enc).unwrap(), 2);
        assert_eq!(decode(&enc).unwrap(), with_goto);
    }

    #[test]
    fn transition_slots_skip_self_and_fall_through() {
        // Line 1 of a 6-line program can target 0, 3, 4, 5 -> slots 0, 1, 2, 3.
        for (target, slot) in [(0usize, 0usize), (3, 1), (4, 2), (5, 3)] {
            assert_eq!(transition_slot(1, target), slot);
            assert_eq!(slot_target(1, slot), target);
        }
    }

    #[test]
    fn malformed_vectors_are_rejected() {
        let program = PlanningProgram::empty(4);
        let shape = encode(&program, 3).unwrap();

        let mut two_actions = shape.clone();
        two_actions.bits[0] = true;
        two_actions.bits[1] = true;
        assert!(matches!(decode(&two_actions), Err(CodecError::MalformedLine { line: 0, .. })));

        let mut dangling_transition = shape.clone();
        let transition_base = 3 * 3;
        dangling_transition.bits[transition_base] = true;
        assert!(decode(&dangling_transition).is_err());

        let mut action_and_goto = shape.clone();
        action_and_goto.bits[0] = true;
        action_and_goto.bits[transition_base] = true;
        action_and_goto.bits[transition_base + 3 * 2] = true;
        assert!(decode(&action_and_goto).is_err());

        let mut wrong_len = shape;
        wrong_len.bits.pop();
        assert!(matches!(decode(&wrong_len), Err(CodecError::LengthMismatch { .. })));
    }

    #[test]
    fn action_id_out_of_table_range_fails_encode() {
        let program = PlanningProgram::empty(3).with_line(0, ProgramLine::Action(ActionId(9)));
        assert!(matches!(
            encode(&program, 4),
            Err(CodecError::ActionOutOfRange { line: 0, action: 9, action_count: 4 })
        ));
    }
}
