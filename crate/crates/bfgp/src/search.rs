//! Best-first synthesis over the space of partially specified programs.
//!
//! The root is the fully undefined sketch. Expanding a node fills the single
//! line where execution stalled (the lowest line any instance halted on
//! undefined) with every action and every legal conditional goto; children
//! are evaluated eagerly on all instances, dead ones are discarded on the
//! spot, and the rest enter a priority queue ordered by the configured
//! evaluation functions, ties broken toward the newest insertion. A node
//! that evaluates as a solution is detected when popped and re-verified with
//! an independent execution pass before being returned.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::{Duration, Instant};

use crate::eval::{evaluate_into, Aggregator, EvalFn, EvaluationRecord, NodeStatus};
use crate::exec::{execute, ExecOptions, ExecScratch, ExecStatus, RevisitPolicy};
use crate::model::{ActionId, GPProblem};
use crate::program::{legal_goto_targets, Feature, PlanningProgram, ProgramLine};

#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Lexicographic ranking, best first; up to six functions.
    pub eval_fns: Vec<EvalFn>,
    pub aggregator: Aggregator,
    /// Per-execution instruction budget; `None` picks one from the largest
    /// register file in the problem.
    pub max_steps: Option<u64>,
    /// Cap on expansions.
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Keep searching after the first solution and return the one applying
    /// the fewest actions.
    pub anytime: bool,
    /// Worker threads for child evaluation; results are merged in canonical
    /// order, so the outcome is identical for any value.
    pub workers: usize,
    /// Track every generated program and panic on a repeat. Costs memory
    /// proportional to the explored space; meant for tests.
    pub check_duplicates: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            eval_fns: vec![EvalFn::GoalDistance, EvalFn::GotoCount],
            aggregator: Aggregator::Sum,
            max_steps: None,
            node_budget: None,
            time_budget: None,
            anytime: false,
            workers: 1,
            check_duplicates: false,
        }
    }
}

/// Default per-execution budget during synthesis: generous for the training
/// instance sizes while still bounding runaway loops.
pub fn synthesis_step_budget(problem: &GPProblem) -> u64 {
    let registers =
        problem.instances.iter().map(|i| i.register_count()).max().unwrap_or(0) as u64;
    512 + 64 * registers * registers
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Nodes popped and offered for expansion.
    pub expanded: u64,
    /// Programs evaluated, including discarded dead ends and the root.
    pub evaluated: u64,
    /// Largest open-list size observed.
    pub peak_open: usize,
    pub solutions_found: u64,
    pub elapsed: Duration,
}

/// One solution discovered during an anytime run.
#[derive(Debug, Clone)]
pub struct SolutionLog {
    pub program: PlanningProgram,
    pub applied_actions: u64,
    pub expanded: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Solved {
        program: PlanningProgram,
        record: EvaluationRecord,
        stats: SearchStats,
        /// Every solution seen, in discovery order (length 1 unless anytime).
        log: Vec<SolutionLog>,
    },
    /// The open list emptied without a solution.
    Exhausted { stats: SearchStats },
    /// The node or time budget ran out first.
    OutOfBudget { stats: SearchStats },
}

impl SearchOutcome {
    pub fn stats(&self) -> &SearchStats {
        match self {
            SearchOutcome::Solved { stats, .. }
            | SearchOutcome::Exhausted { stats }
            | SearchOutcome::OutOfBudget { stats } => stats,
        }
    }

    pub fn solution(&self) -> Option<&PlanningProgram> {
        match self {
            SearchOutcome::Solved { program, .. } => Some(program),
            _ => None,
        }
    }
}

struct OpenEntry {
    key: [i64; 6],
    seq: u64,
    program: PlanningProgram,
    record: EvaluationRecord,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key && self.seq == other.seq
    }
}

impl Eq for OpenEntry {}

impl Ord for OpenEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed on the key: the max-heap then pops the smallest key.
        // Ties break toward the NEWEST insertion, so equal-key plateaus are
        // descended rather than swept breadth-first; domains whose goal
        // distance stays flat across several pointer moves (several of the
        // built-in ones) are intractable the other way around.
        other.key.cmp(&self.key).then_with(|| self.seq.cmp(&other.seq))
    }
}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Children of `program` at its stalled line: `frontier` — the lowest line
/// where some execution stopped on an undefined instruction — is filled with
/// each action, then with each goto (targets ascending, features in flag
/// order). Empty when that line is not an undefined interior line. Programs
/// whose executions all stall on the same line grow strictly front to back;
/// a forward jump can put the frontier below lines that are already filled,
/// and the in-between lines get programmed once some execution falls through
/// to them.
pub fn successors(
    program: &PlanningProgram,
    frontier: usize,
    action_count: usize,
) -> Vec<PlanningProgram> {
    let n = program.len();
    if frontier >= n - 1 || program.line(frontier) != ProgramLine::Undefined {
        return Vec::new();
    }
    let mut children = Vec::with_capacity(action_count + (n - 2) * 4);
    for id in 0..action_count {
        children.push(program.with_line(frontier, ProgramLine::Action(ActionId(id as u16))));
    }
    for target in legal_goto_targets(frontier, n) {
        for feature in Feature::ALL {
            children.push(program.with_line(frontier, ProgramLine::Goto { target, feature }));
        }
    }
    children
}

fn evaluate_children(
    children: &[PlanningProgram],
    problem: &GPProblem,
    options: &ExecOptions,
    aggregator: Aggregator,
    workers: usize,
    scratch: &mut ExecScratch,
) -> Vec<EvaluationRecord> {
    if workers <= 1 || children.len() < 2 {
        return children
            .iter()
            .map(|c| evaluate_into(c, problem, options, aggregator, scratch))
            .collect();
    }
    let mut records: Vec<Option<EvaluationRecord>> = vec![None; children.len()];
    let chunk = children.len().div_ceil(workers);
    std::thread::scope(|scope| {
        for (child_chunk, record_chunk) in children.chunks(chunk).zip(records.chunks_mut(chunk)) {
            scope.spawn(move || {
                let mut scratch = ExecScratch::default();
                for (child, slot) in child_chunk.iter().zip(record_chunk.iter_mut()) {
                    *slot = Some(evaluate_into(child, problem, options, aggregator, &mut scratch));
                }
            });
        }
    });
    records.into_iter().map(|r| r.expect("every chunk was evaluated")).collect()
}

/// Confirms a claimed solution with a fresh, fully revisit-checked run on
/// every instance. A failure here would mean the evaluator and interpreter
/// disagree, so it panics rather than returning a wrong program.
fn reverify(program: &PlanningProgram, problem: &GPProblem, max_steps: u64) {
    let ctx = crate::exec::ExecContext {
        actions: &problem.actions,
        arithmetic_bound: problem.arithmetic_bound,
    };
    let options = ExecOptions {
        max_steps: max_steps.max(10_000_000),
        revisit: RevisitPolicy::EveryStep,
        record_trace: false,
    };
    for instance in &problem.instances {
        let outcome = execute(program, ctx, instance, &options);
        assert_eq!(
            outcome.status,
            ExecStatus::Solved,
            "solution failed re-verification on instance `{}`",
            instance.label
        );
    }
}

/// Runs the synthesis search from the empty `n`-line sketch.
pub fn bfgp(problem: &GPProblem, n: usize, config: &SearchConfig) -> SearchOutcome {
    resume_from(PlanningProgram::empty(n), problem, config)
}

/// Runs the synthesis search from an existing sketch, which may already have
/// some lines filled (or even be a complete solution).
pub fn resume_from(
    root: PlanningProgram,
    problem: &GPProblem,
    config: &SearchConfig,
) -> SearchOutcome {
    let start = Instant::now();
    let max_steps = config.max_steps.unwrap_or_else(|| synthesis_step_budget(problem));
    let options = ExecOptions::synthesis(max_steps);
    let action_count = problem.actions.len();
    let mut scratch = ExecScratch::default();
    let mut stats = SearchStats::default();
    let mut log: Vec<SolutionLog> = Vec::new();
    let mut seen: HashSet<PlanningProgram> = HashSet::new();
    let mut open: BinaryHeap<OpenEntry> = BinaryHeap::new();
    let mut seq: u64 = 0;

    let root_record = evaluate_into(&root, problem, &options, config.aggregator, &mut scratch);
    stats.evaluated = 1;
    if config.check_duplicates {
        seen.insert(root.clone());
    }
    if root_record.status != NodeStatus::DeadEnd {
        open.push(OpenEntry {
            key: root_record.rank_key(&config.eval_fns),
            seq,
            program: root,
            record: root_record,
        });
        seq += 1;
        stats.peak_open = 1;
    }

    let aggregator = config.aggregator;
    let finish = move |mut stats: SearchStats,
                       log: Vec<SolutionLog>,
                       fallback: fn(SearchStats) -> SearchOutcome| {
        stats.elapsed = start.elapsed();
        // Anytime runs fall back to the best logged solution when the space
        // or budget runs out after one was found.
        let best = log
            .iter()
            .enumerate()
            .min_by_key(|(i, s)| (s.applied_actions, *i))
            .map(|(_, s)| s.program.clone());
        match best {
            Some(program) => {
                reverify(&program, problem, max_steps);
                let record = crate::eval::evaluate(
                    &program,
                    problem,
                    &ExecOptions::synthesis(max_steps),
                    aggregator,
                );
                SearchOutcome::Solved { program, record, stats, log }
            }
            None => fallback(stats),
        }
    };

    loop {
        if let Some(budget) = config.time_budget {
            if start.elapsed() >= budget {
                return finish(stats, log, |stats| SearchOutcome::OutOfBudget { stats });
            }
        }
        let Some(entry) = open.pop() else {
            return finish(stats, log, |stats| SearchOutcome::Exhausted { stats });
        };
        if entry.record.status == NodeStatus::Solution {
            log.push(SolutionLog {
                program: entry.program.clone(),
                applied_actions: entry.record.applied_actions,
                expanded: stats.expanded,
                elapsed: start.elapsed(),
            });
            stats.solutions_found += 1;
            if !config.anytime {
                stats.elapsed = start.elapsed();
                reverify(&entry.program, problem, max_steps);
                return SearchOutcome::Solved {
                    program: entry.program,
                    record: entry.record,
                    stats,
                    log,
                };
            }
            continue;
        }
        if let Some(budget) = config.node_budget {
            if stats.expanded >= budget {
                return finish(stats, log, |stats| SearchOutcome::OutOfBudget { stats });
            }
        }
        stats.expanded += 1;

        let Some(frontier) = entry.record.frontier else {
            continue;
        };
        let children = successors(&entry.program, frontier, action_count);
        let records = evaluate_children(
            &children,
            problem,
            &options,
            config.aggregator,
            config.workers,
            &mut scratch,
        );
        stats.evaluated += children.len() as u64;
        for (child, record) in children.into_iter().zip(records) {
            if config.check_duplicates {
                assert!(
                    seen.insert(child.clone()),
                    "search generated the same program twice:\n{child:?}"
                );
            }
            if record.status == NodeStatus::DeadEnd {
                continue;
            }
            open.push(OpenEntry {
                key: record.rank_key(&config.eval_fns),
                seq,
                program: child,
                record,
            });
            seq += 1;
        }
        stats.peak_open = stats.peak_open.max(open.len());
    }
}
