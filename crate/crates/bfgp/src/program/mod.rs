//! Structured programs: a fixed number of lines holding actions, conditional
//! gotos over the flag features, or nothing yet, with the final line fixed to
//! `end`. Includes the plain-text format used for solution files.

pub mod encoding;

use std::fmt;

use crate::model::{ActionId, GroundedAction};

/// The four conjunctive features over the flags. A goto line stores the
/// feature under which execution *falls through*; jumps happen when the
/// feature is false, matching the convention of printing the negated jump
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feature {
    NotZNotC,
    ZNotC,
    NotZC,
    ZC,
}

impl Feature {
    pub const ALL: [Feature; 4] = [Feature::NotZNotC, Feature::ZNotC, Feature::NotZC, Feature::ZC];

    pub fn holds(self, flag_z: bool, flag_c: bool) -> bool {
        match self {
            Feature::NotZNotC => !flag_z && !flag_c,
            Feature::ZNotC => flag_z && !flag_c,
            Feature::NotZC => !flag_z && flag_c,
            Feature::ZC => flag_z && flag_c,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Feature::NotZNotC => 0,
            Feature::ZNotC => 1,
            Feature::NotZC => 2,
            Feature::ZC => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Feature> {
        Feature::ALL.get(i).copied()
    }

    fn parse(s: &str) -> Option<Feature> {
        match s {
            "!yz&!yc" => Some(Feature::NotZNotC),
            "yz&!yc" => Some(Feature::ZNotC),
            "!yz&yc" => Some(Feature::NotZC),
            "yz&yc" => Some(Feature::ZC),
            _ => None,
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Feature::NotZNotC => "!yz&!yc",
            Feature::ZNotC => "yz&!yc",
            Feature::NotZC => "!yz&yc",
            Feature::ZC => "yz&yc",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProgramLine {
    Undefined,
    Action(ActionId),
    Goto { target: usize, feature: Feature },
    End,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProgramError {
    #[error("a program needs at least two lines, got {0}")]
    TooShort(usize),
    #[error("line {0} must be `end`")]
    MissingEnd(usize),
    #[error("line {0}: `end` is only allowed on the last line")]
    InteriorEnd(usize),
    #[error("line {line}: goto target {target} must lie before the line or at least two past it")]
    IllegalGotoTarget { line: usize, target: usize },
}

/// A program sketch: `n` lines, the last of which is always `end`. Undefined
/// lines are legal and halt execution when reached, which is what drives the
/// search's successor generation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PlanningProgram {
    lines: Vec<ProgramLine>,
}

/// Goto targets legal for `line` in an `n`-line program: anything strictly
/// before the line, or strictly past its fall-through successor.
pub fn legal_goto_targets(line: usize, n: usize) -> impl Iterator<Item = usize> {
    (0..line).chain(line + 2..n).filter(move |&t| t != line)
}

impl PlanningProgram {
    /// The root sketch: every interior line undefined.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 2, "a program needs at least two lines");
        let mut lines = vec![ProgramLine::Undefined; n - 1];
        lines.push(ProgramLine::End);
        PlanningProgram { lines }
    }

    /// Validating constructor for externally supplied line vectors.
    pub fn from_lines(lines: Vec<ProgramLine>) -> Result<Self, ProgramError> {
        let n = lines.len();
        if n < 2 {
            return Err(ProgramError::TooShort(n));
        }
        if lines[n - 1] != ProgramLine::End {
            return Err(ProgramError::MissingEnd(n - 1));
        }
        for (i, line) in lines[..n - 1].iter().enumerate() {
            match *line {
                ProgramLine::End => return Err(ProgramError::InteriorEnd(i)),
                ProgramLine::Goto { target, .. } => {
                    if !(target < i || (target > i + 1 && target < n)) {
                        return Err(ProgramError::IllegalGotoTarget { line: i, target });
                    }
                }
                _ => {}
            }
        }
        Ok(PlanningProgram { lines })
    }

    /// Non-validating constructor for tests that need deliberately bent
    /// programs (e.g. tight self-loops); execution copes with any target.
    pub fn from_lines_unchecked(lines: Vec<ProgramLine>) -> Self {
        PlanningProgram { lines }
    }

    pub fn len(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn lines(&self) -> &[ProgramLine] {
        &self.lines
    }

    pub fn line(&self, i: usize) -> ProgramLine {
        self.lines[i]
    }

    /// Copy of this program with one line replaced (search successor step).
    pub fn with_line(&self, i: usize, line: ProgramLine) -> Self {
        let mut lines = self.lines.clone();
        lines[i] = line;
        PlanningProgram { lines }
    }

    /// Renders the program; action lines print their table name.
    pub fn to_text(&self, actions: &[GroundedAction]) -> String {
        let mut out = String::new();
        for (i, line) in self.lines.iter().enumerate() {
            let rendered = match *line {
                ProgramLine::Undefined => "undefined".to_string(),
                ProgramLine::Action(ActionId(id)) => actions[id as usize].name.clone(),
                ProgramLine::Goto { target, feature } => format!("goto({target},!({feature}))"),
                ProgramLine::End => "end".to_string(),
            };
            out.push_str(&format!("{i}. {rendered}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ProgramParseError {
    pub line: usize,
    pub message: String,
}

/// Parses the text produced by [`PlanningProgram::to_text`]. Lines must be
/// numbered consecutively from 0; action names resolve against the table.
pub fn parse_program(
    text: &str,
    actions: &[GroundedAction],
) -> Result<PlanningProgram, ProgramParseError> {
    let err = |line: usize, message: String| ProgramParseError { line, message };
    let mut lines: Vec<ProgramLine> = Vec::new();
    let mut last_lineno = 0;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        last_lineno = lineno;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (num, body) = trimmed
            .split_once('.')
            .ok_or_else(|| err(lineno, format!("expected `<index>. <instruction>`, got `{trimmed}`")))?;
        let index: usize = num
            .trim()
            .parse()
            .map_err(|_| err(lineno, format!("invalid line index `{}`", num.trim())))?;
        if index != lines.len() {
            return Err(err(lineno, format!("expected line {}, found line {index}", lines.len())));
        }
        let body = body.trim();
        let parsed = if body == "end" {
            ProgramLine::End
        } else if body == "undefined" {
            ProgramLine::Undefined
        } else if let Some(args) = body.strip_prefix("goto(").and_then(|b| b.strip_suffix(')')) {
            let (target, cond) = args
                .split_once(',')
                .ok_or_else(|| err(lineno, format!("malformed goto `{body}`")))?;
            let target: usize = target
                .trim()
                .parse()
                .map_err(|_| err(lineno, format!("invalid goto target `{}`", target.trim())))?;
            let feature = cond
                .trim()
                .strip_prefix("!(")
                .and_then(|c| c.strip_suffix(')'))
                .and_then(Feature::parse)
                .ok_or_else(|| err(lineno, format!("invalid goto condition `{}`", cond.trim())))?;
            ProgramLine::Goto { target, feature }
        } else {
            let id = actions
                .iter()
                .position(|a| a.name == body)
                .ok_or_else(|| err(lineno, format!("unknown action `{body}`")))?;
            ProgramLine::Action(ActionId(id as u16))
        };
        lines.push(parsed);
    }
    PlanningProgram::from_lines(lines).map_err(|e| err(last_lineno, e.to_string()))
}
