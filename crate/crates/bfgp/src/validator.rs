//! Large-scale validation of programs on held-out instance sets, with or
//! without revisit-based infinite-run detection, plus CSV/JSON reporting.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::domains::{DomainId, GenError};
use crate::exec::{execute, ExecContext, ExecOptions, ExecStatus, RevisitPolicy};
use crate::model::{GPProblem, Instance};
use crate::program::PlanningProgram;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Hash every visited machine state and flag revisits as infinite runs.
    DetectInfinite,
    /// Rely on the step cap alone; terminating programs finish much faster.
    Fast,
}

impl ValidationMode {
    pub fn name(self) -> &'static str {
        match self {
            ValidationMode::DetectInfinite => "detect-infinite",
            ValidationMode::Fast => "fast",
        }
    }
}

/// One validated instance: what happened, how long the run was, and how
/// long it took.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceResult {
    pub label: String,
    pub status: ExecStatus,
    pub steps: u64,
    pub duration: Duration,
}

#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub mode: ValidationMode,
    pub max_steps: u64,
    pub rows: Vec<InstanceResult>,
    pub solved: usize,
    pub total_duration: Duration,
    /// Portable memory figure: the largest per-instance product of visited
    /// states and machine-state footprint, not an OS-level measurement.
    pub peak_memory_estimate: u64,
}

impl ValidationReport {
    pub fn all_solved(&self) -> bool {
        self.solved == self.rows.len()
    }

    pub fn failing_labels(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.status != ExecStatus::Solved)
            .map(|r| r.label.as_str())
            .collect()
    }
}

fn state_footprint(instance: &Instance) -> u64 {
    // Registers are 8 bytes, pointers 4, plus the two flags.
    (instance.register_count() * 8 + instance.pointer_count() * 4 + 2) as u64
}

/// Short stable token for an execution status, as used in the CSV output.
pub fn status_token(status: ExecStatus) -> String {
    match status {
        ExecStatus::Solved => "solved".to_string(),
        ExecStatus::Incorrect => "incorrect".to_string(),
        ExecStatus::Inapplicable(line) => format!("inapplicable@{line}"),
        ExecStatus::HaltedUndefined(line) => format!("halted@{line}"),
        ExecStatus::Infinite => "infinite".to_string(),
    }
}

/// Runs `program` on every instance of `problem`, sequentially, and gathers
/// per-instance outcomes into a report ordered by instance label.
pub fn validate(
    program: &PlanningProgram,
    problem: &GPProblem,
    mode: ValidationMode,
    max_steps: u64,
) -> ValidationReport {
    let options = ExecOptions {
        max_steps,
        revisit: match mode {
            ValidationMode::DetectInfinite => RevisitPolicy::EveryStep,
            ValidationMode::Fast => RevisitPolicy::Off,
        },
        record_trace: false,
    };
    let ctx = ExecContext { actions: &problem.actions, arithmetic_bound: problem.arithmetic_bound };
    let mut rows = Vec::with_capacity(problem.instances.len());
    let mut solved = 0;
    let mut total_duration = Duration::ZERO;
    let mut peak_memory_estimate = 0;
    for instance in &problem.instances {
        let started = Instant::now();
        let outcome = execute(program, ctx, instance, &options);
        let duration = started.elapsed();
        total_duration += duration;
        if outcome.status == ExecStatus::Solved {
            solved += 1;
        }
        let footprint = state_footprint(instance);
        let visited = match mode {
            // Every executed step lands one stored state, plus the initial.
            ValidationMode::DetectInfinite => outcome.steps_executed + 1,
            ValidationMode::Fast => 1,
        };
        peak_memory_estimate = peak_memory_estimate.max(visited * footprint);
        rows.push(InstanceResult {
            label: instance.label.clone(),
            status: outcome.status,
            steps: outcome.steps_executed,
            duration,
        });
    }
    rows.sort_by(|a, b| a.label.cmp(&b.label));
    ValidationReport { mode, max_steps, rows, solved, total_duration, peak_memory_estimate }
}

/// The held-out instance set for a built-in domain. Desk scale keeps the
/// sets laptop-sized (e.g. every 100th triangular-sum term); `full` switches
/// to the complete sweep.
pub fn make_validation_set(name: &str, seed: u64, full: bool) -> Result<Vec<Instance>, GenError> {
    Ok(DomainId::parse(name)?.validation_instances_seeded(full, seed))
}

/// One CSV row per instance: `label,status,steps,duration_us`.
pub fn render_csv(report: &ValidationReport) -> String {
    let mut out = String::from("label,status,steps,duration_us\n");
    for row in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.label,
            status_token(row.status),
            row.steps,
            row.duration.as_micros()
        ));
    }
    out
}

#[derive(Serialize)]
struct AggregateJson<'a> {
    mode: &'a str,
    max_steps: u64,
    instances: usize,
    solved: usize,
    total_duration_us: u128,
    peak_memory_estimate_bytes: u64,
}

/// The aggregate half of the report as a JSON object.
pub fn render_json(report: &ValidationReport) -> String {
    let agg = AggregateJson {
        mode: report.mode.name(),
        max_steps: report.max_steps,
        instances: report.rows.len(),
        solved: report.solved,
        total_duration_us: report.total_duration.as_micros(),
        peak_memory_estimate_bytes: report.peak_memory_estimate,
    };
    serde_json::to_string_pretty(&agg).expect("aggregate report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::VALIDATION_BOUND;
    use crate::model::{build_action_set, extend_instance, PartialState, VariableSpec};
    use crate::program::{parse_program, Feature, ProgramLine};
    use crate::PlanningProgram;

    const CAP: u64 = 10_000_000;

    #[test]
    fn reverse_reference_validates_fifty_of_fifty() {
        let problem = DomainId::Reverse.validation_problem(false);
        let program = DomainId::Reverse.reference_solution(&problem.actions);
        let report = validate(&program, &problem, ValidationMode::DetectInfinite, CAP);
        assert_eq!(report.rows.len(), 50);
        assert_eq!(report.solved, 50);
        assert!(report.all_solved());
        assert!(report.failing_labels().is_empty());
    }

    #[test]
    fn largest_triangular_sum_instance_validates_under_revisit_detection() {
        let problem = DomainId::Tsum.validation_problem(false);
        let program = DomainId::Tsum.reference_solution(&problem.actions);
        let last = problem.instances.last().unwrap().clone();
        let small = GPProblem::new(
            vec![last],
            problem.actions.clone(),
            problem.pointer_names.clone(),
            problem.arithmetic_bound,
        );
        let report = validate(&program, &small, ValidationMode::DetectInfinite, CAP);
        assert!(report.all_solved());
        // Revisit detection never cries wolf on a terminating program.
        assert_eq!(report.rows[0].status, ExecStatus::Solved);
        assert!(report.rows[0].steps < CAP);
    }

    #[test]
    fn modes_agree_on_terminating_programs() {
        let problem = DomainId::Select.training_problem();
        let program = DomainId::Select.reference_solution(&problem.actions);
        let slow = validate(&program, &problem, ValidationMode::DetectInfinite, CAP);
        let fast = validate(&program, &problem, ValidationMode::Fast, CAP);
        assert_eq!(slow.rows.len(), fast.rows.len());
        for (a, b) in slow.rows.iter().zip(&fast.rows) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.status, b.status);
            assert_eq!(a.steps, b.steps);
        }
        assert_eq!(slow.solved, fast.solved);
    }

    fn looping_problem() -> (GPProblem, PlanningProgram) {
        let actions = build_action_set(2, &[], false);
        let vars = vec![VariableSpec::new("x0", 0, 9), VariableSpec::new("x1", 0, 9)];
        let mut goal = PartialState::default();
        goal.assign_register(0, 9);
        let inst = extend_instance("loop-0", vars, vec![0, 0], goal, 2).unwrap();
        let problem = GPProblem::new(
            vec![inst],
            actions,
            vec!["z1".to_string(), "z2".to_string()],
            100,
        );
        let set_id = problem.action_by_name("set(z1,z2)").unwrap().0 as u16;
        let program = PlanningProgram::from_lines(vec![
            ProgramLine::Action(crate::model::ActionId(set_id)),
            ProgramLine::Goto { target: 0, feature: Feature::ZC },
            ProgramLine::End,
        ])
        .unwrap();
        (problem, program)
    }

    #[test]
    fn looping_program_reports_infinite_on_every_instance() {
        let (problem, program) = looping_problem();
        let detect = validate(&program, &problem, ValidationMode::DetectInfinite, CAP);
        assert_eq!(detect.solved, 0);
        assert!(detect.rows.iter().all(|r| r.status == ExecStatus::Infinite));
        // Revisit hashing catches the cycle promptly rather than burning the cap.
        assert!(detect.rows[0].steps < 10);

        let fast = validate(&program, &problem, ValidationMode::Fast, 5_000);
        assert!(fast.rows.iter().all(|r| r.status == ExecStatus::Infinite));
        assert_eq!(fast.rows[0].steps, 5_000);
    }

    #[test]
    fn report_totals_match_per_instance_rows() {
        let problem = DomainId::Corridor.training_problem();
        let program = DomainId::Corridor.reference_solution(&problem.actions);
        let report = validate(&program, &problem, ValidationMode::DetectInfinite, CAP);
        assert_eq!(report.solved, report.rows.iter().filter(|r| r.status == ExecStatus::Solved).count());
        let sum: Duration = report.rows.iter().map(|r| r.duration).sum();
        assert_eq!(report.total_duration, sum);
        assert!(report.solved <= report.rows.len());
        let mut labels: Vec<_> = report.rows.iter().map(|r| r.label.clone()).collect();
        let sorted = {
            let mut s = labels.clone();
            s.sort();
            s
        };
        assert_eq!(labels, sorted);
        labels.dedup();
        assert_eq!(labels.len(), report.rows.len());
    }

    #[test]
    fn memory_estimate_scales_with_visited_states() {
        let problem = DomainId::Fibonacci.training_problem();
        let program = DomainId::Fibonacci.reference_solution(&problem.actions);
        let detect = validate(&program, &problem, ValidationMode::DetectInfinite, CAP);
        let fast = validate(&program, &problem, ValidationMode::Fast, CAP);
        assert!(detect.peak_memory_estimate > fast.peak_memory_estimate);
        assert!(fast.peak_memory_estimate > 0);
    }

    #[test]
    fn validation_sets_resolve_by_name_with_pinned_extremes() {
        let fibo = make_validation_set("fibonacci", 7, false).unwrap();
        assert_eq!(fibo.len(), 33);
        assert_eq!(fibo.last().unwrap().goal.registers.get(&43), Some(&701_408_733));
        assert!(make_validation_set("hanoi", 7, false).is_err());
        // Random content differs by seed, shapes stay fixed.
        let a = make_validation_set("sorting", 1, false).unwrap();
        let b = make_validation_set("sorting", 2, false).unwrap();
        assert_eq!(a.len(), b.len());
        assert_ne!(a[0].initial.registers, b[0].initial.registers);
        assert!(a[0].initial.registers[..12].iter().all(|v| (0..=VALIDATION_BOUND).contains(v)));
    }

    #[test]
    fn csv_and_json_renderings_carry_the_report() {
        let problem = DomainId::Tsum.training_problem();
        let program = DomainId::Tsum.reference_solution(&problem.actions);
        let report = validate(&program, &problem, ValidationMode::Fast, CAP);
        let csv = render_csv(&report);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("label,status,steps,duration_us"));
        assert_eq!(lines.count(), 10);
        assert!(csv.contains("tsum-00001,solved,"));

        let json = render_json(&report);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["mode"], "fast");
        assert_eq!(value["instances"], 10);
        assert_eq!(value["solved"], 10);
        assert!(value["total_duration_us"].is_number());
        assert!(value["peak_memory_estimate_bytes"].as_u64().unwrap() > 0);
    }

    #[test]
    fn truncated_program_text_reports_its_line() {
        let problem = DomainId::Tsum.training_problem();
        let err = parse_program("0. inc(b)\n1. add(*a,*b)\n", &problem.actions).unwrap_err();
        assert!(err.to_string().contains("line"));
    }
}
