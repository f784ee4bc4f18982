//! Program evaluation: cheap structural metrics computed from the line
//! vector, and performance metrics computed by running the program on every
//! instance of a problem. Records feed the search's lexicographic ranking.

use std::collections::HashSet;

use crate::exec::{run, ExecContext, ExecOptions, ExecScratch, ExecStatus};
use crate::model::GPProblem;
use crate::program::{PlanningProgram, ProgramLine};

/// The six evaluation functions, addressed by their short names.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalFn {
    /// `f1`: number of goto lines.
    GotoCount,
    /// `f2`: number of undefined lines.
    UndefinedCount,
    /// `f3`: action lines minus distinct actions (repetition count).
    RepeatedActions,
    /// `h4`: lines minus the highest reached line count across instances.
    LinesUnreached,
    /// `h5`: summed squared distance of final states from their goals.
    GoalDistance,
    /// `f6`: total actions applied across all instances.
    AppliedActions,
}

impl EvalFn {
    pub const ALL: [EvalFn; 6] = [
        EvalFn::GotoCount,
        EvalFn::UndefinedCount,
        EvalFn::RepeatedActions,
        EvalFn::LinesUnreached,
        EvalFn::GoalDistance,
        EvalFn::AppliedActions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EvalFn::GotoCount => "f1",
            EvalFn::UndefinedCount => "f2",
            EvalFn::RepeatedActions => "f3",
            EvalFn::LinesUnreached => "h4",
            EvalFn::GoalDistance => "h5",
            EvalFn::AppliedActions => "f6",
        }
    }

    pub fn parse(name: &str) -> Result<EvalFn, UnknownEvalFn> {
        EvalFn::ALL
            .into_iter()
            .find(|f| f.name() == name)
            .ok_or_else(|| UnknownEvalFn(name.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown evaluation function `{0}` (expected one of f1, f2, f3, h4, h5, f6)")]
pub struct UnknownEvalFn(pub String);

/// Parses a comma-separated list such as `h5,f1`.
pub fn parse_eval_list(list: &str) -> Result<Vec<EvalFn>, UnknownEvalFn> {
    list.split(',').map(|s| EvalFn::parse(s.trim())).collect()
}

/// How per-instance metrics (`h5`, `f6`) combine across instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Aggregator {
    #[default]
    Sum,
    Max,
    Avg,
}

impl Aggregator {
    fn combine(self, values: impl Iterator<Item = u64>) -> u64 {
        match self {
            Aggregator::Sum => values.fold(0u64, |a, v| a.saturating_add(v)),
            Aggregator::Max => values.max().unwrap_or(0),
            Aggregator::Avg => {
                let mut sum = 0u64;
                let mut count = 0u64;
                for v in values {
                    sum = sum.saturating_add(v);
                    count += 1;
                }
                if count == 0 {
                    0
                } else {
                    sum / count
                }
            }
        }
    }
}

/// Verdict attached to an evaluated program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeStatus {
    /// Solves every instance.
    Solution,
    /// Fails at least one instance outright (wrong end state, inapplicable
    /// action, or non-termination); never worth expanding.
    DeadEnd,
    /// Everything else: still has undefined lines to fill.
    Promising,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvaluationRecord {
    pub goto_count: u32,
    pub undefined_count: u32,
    pub repeated_actions: u32,
    pub lines_unreached: u32,
    pub goal_distance: u64,
    pub applied_actions: u64,
    /// Highest count of line slots reached by any instance (one past the
    /// largest line index occupied).
    pub pc_max: usize,
    /// Lowest line on which some instance's execution stopped because the
    /// line is still undefined; `None` when every execution terminated.
    /// Filling this line is the only edit that can unblock a stalled
    /// execution, so it is the line successor generation programs next.
    pub frontier: Option<usize>,
    pub status: NodeStatus,
}

impl EvaluationRecord {
    /// Lexicographic key over the requested functions, zero-padded to six
    /// entries. Saturates `u64` metrics into `i64`.
    pub fn rank_key(&self, fns: &[EvalFn]) -> [i64; 6] {
        let mut key = [0i64; 6];
        for (slot, f) in key.iter_mut().zip(fns.iter()) {
            *slot = match f {
                EvalFn::GotoCount => self.goto_count as i64,
                EvalFn::UndefinedCount => self.undefined_count as i64,
                EvalFn::RepeatedActions => self.repeated_actions as i64,
                EvalFn::LinesUnreached => self.lines_unreached as i64,
                EvalFn::GoalDistance => self.goal_distance.min(i64::MAX as u64) as i64,
                EvalFn::AppliedActions => self.applied_actions.min(i64::MAX as u64) as i64,
            };
        }
        key
    }
}

/// Counts gotos, undefined lines, and repeated action lines.
pub fn eval_structural(program: &PlanningProgram) -> (u32, u32, u32) {
    let mut gotos = 0u32;
    let mut undefined = 0u32;
    let mut action_lines = 0u32;
    let mut distinct = HashSet::new();
    for line in program.lines() {
        match line {
            ProgramLine::Goto { .. } => gotos += 1,
            ProgramLine::Undefined => undefined += 1,
            ProgramLine::Action(id) => {
                action_lines += 1;
                distinct.insert(*id);
            }
            ProgramLine::End => {}
        }
    }
    (gotos, undefined, action_lines - distinct.len() as u32)
}

pub(crate) fn evaluate_into(
    program: &PlanningProgram,
    problem: &GPProblem,
    options: &ExecOptions,
    aggregator: Aggregator,
    scratch: &mut ExecScratch,
) -> EvaluationRecord {
    let (goto_count, undefined_count, repeated_actions) = eval_structural(program);
    let ctx = ExecContext { actions: &problem.actions, arithmetic_bound: problem.arithmetic_bound };
    let n = program.len();
    let mut pc_max = 0usize;
    let mut frontier: Option<usize> = None;
    let mut distances: Vec<u64> = Vec::with_capacity(problem.instances.len());
    let mut applied: Vec<u64> = Vec::with_capacity(problem.instances.len());
    let mut all_solved = true;
    let mut dead = false;
    for instance in &problem.instances {
        let result = run(program, ctx, instance, options, scratch, None);
        pc_max = pc_max.max(result.pc_reached + 1);
        if let ExecStatus::HaltedUndefined(line) = result.status {
            frontier = Some(frontier.map_or(line, |f| f.min(line)));
        }
        distances.push(instance.goal.squared_distance(&scratch.state));
        applied.push(result.applied_actions);
        if result.status != ExecStatus::Solved {
            all_solved = false;
        }
        if result.status.is_dead_end() {
            // The program is disqualified no matter what the remaining
            // instances say, so the record can stay partial.
            dead = true;
            break;
        }
    }
    let status = if dead {
        NodeStatus::DeadEnd
    } else if all_solved && !problem.instances.is_empty() {
        NodeStatus::Solution
    } else {
        NodeStatus::Promising
    };
    EvaluationRecord {
        goto_count,
        undefined_count,
        repeated_actions,
        lines_unreached: (n.saturating_sub(pc_max)) as u32,
        goal_distance: aggregator.combine(distances.into_iter()),
        applied_actions: aggregator.combine(applied.into_iter()),
        pc_max,
        frontier,
        status,
    }
}

/// Evaluates `program` against every instance of `problem`.
pub fn evaluate(
    program: &PlanningProgram,
    problem: &GPProblem,
    options: &ExecOptions,
    aggregator: Aggregator,
) -> EvaluationRecord {
    let mut scratch = ExecScratch::default();
    evaluate_into(program, problem, options, aggregator, &mut scratch)
}
