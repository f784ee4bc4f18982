//! Program interpreter. Runs a program on one instance from line 0 with both
//! flags cleared, tracking the applied-action count, the highest line index
//! occupied, and one of five terminal statuses. Non-termination is caught
//! either by state-revisit detection or by a step budget.

use std::collections::HashSet;
use std::hash::{BuildHasherDefault, Hasher};

use crate::model::{apply_op, ActionId, GroundedAction, Instance, MachineState, VariableSpec};
use crate::program::{PlanningProgram, ProgramLine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExecStatus {
    /// Reached `end` with the goal satisfied.
    Solved,
    /// Reached `end` anywhere else.
    Incorrect,
    /// An action on the given line failed its applicability check.
    Inapplicable(usize),
    /// Execution reached a still-undefined line.
    HaltedUndefined(usize),
    /// A state revisit or the step budget proved/declared non-termination.
    Infinite,
}

impl ExecStatus {
    /// Statuses that disqualify a program outright during search.
    pub fn is_dead_end(self) -> bool {
        matches!(self, ExecStatus::Incorrect | ExecStatus::Inapplicable(_) | ExecStatus::Infinite)
    }
}

/// How aggressively to hash states for revisit detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevisitPolicy {
    /// Hash after every executed instruction. Complete detection; used when
    /// validating untrusted programs.
    EveryStep,
    /// Hash only on landing from a backward jump. Any loop must take one, so
    /// detection power is unchanged while straight-line stretches stay free.
    BackwardJumps,
    /// Rely on the step budget alone.
    Off,
}

#[derive(Debug, Clone, Copy)]
pub struct ExecOptions {
    /// Executed-instruction budget (actions and gotos); exceeding it reports
    /// `Infinite`.
    pub max_steps: u64,
    pub revisit: RevisitPolicy,
    /// Record the sequence of applied action ids.
    pub record_trace: bool,
}

impl ExecOptions {
    pub fn synthesis(max_steps: u64) -> Self {
        ExecOptions { max_steps, revisit: RevisitPolicy::BackwardJumps, record_trace: false }
    }

    pub fn validation() -> Self {
        ExecOptions { max_steps: 10_000_000, revisit: RevisitPolicy::EveryStep, record_trace: false }
    }
}

/// Everything fixed across instances of one problem.
#[derive(Debug, Clone, Copy)]
pub struct ExecContext<'a> {
    pub actions: &'a [GroundedAction],
    pub arithmetic_bound: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionOutcome {
    pub status: ExecStatus,
    /// Instructions executed (actions plus gotos; halting lines excluded).
    pub steps_executed: u64,
    /// Actions that actually applied.
    pub applied_actions: u64,
    /// Highest line index occupied by the program counter.
    pub pc_reached: usize,
    pub final_state: MachineState,
    /// Applied action ids, in order; empty unless tracing was requested.
    pub action_trace: Vec<ActionId>,
}

// Multiplicative mixer in the fx-hash style: cheap and adequate for loop
// detection over machine states.
const SEED: u64 = 0x51_7c_c1_b7_27_22_0a_95;

#[derive(Default)]
pub(crate) struct Mix64(u64);

impl Hasher for Mix64 {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    fn write_u64(&mut self, v: u64) {
        self.0 = (self.0.rotate_left(5) ^ v).wrapping_mul(SEED);
    }
}

type RevisitSet = HashSet<u64, BuildHasherDefault<Mix64>>;

fn state_signature(state: &MachineState, pc: usize) -> u64 {
    let mut h: u64 = 0;
    let mut mix = |v: u64| h = (h.rotate_left(5) ^ v).wrapping_mul(SEED);
    for &r in &state.registers {
        mix(r as u64);
    }
    for &p in &state.pointers {
        mix(p as u64);
    }
    mix(((state.flag_z as u64) << 1) | state.flag_c as u64);
    mix(pc as u64);
    h
}

/// Reusable buffers for back-to-back executions; keeps the evaluation hot
/// path allocation-free.
#[derive(Default)]
pub(crate) struct ExecScratch {
    pub state: MachineState,
    visited: RevisitSet,
}

pub(crate) struct RunResult {
    pub status: ExecStatus,
    pub steps_executed: u64,
    pub applied_actions: u64,
    pub pc_reached: usize,
}

/// Core interpreter loop. The final state is left in `scratch.state`.
pub(crate) fn run(
    program: &PlanningProgram,
    ctx: ExecContext<'_>,
    instance: &Instance,
    options: &ExecOptions,
    scratch: &mut ExecScratch,
    mut trace: Option<&mut Vec<ActionId>>,
) -> RunResult {
    let specs: &[VariableSpec] = &instance.variables;
    scratch.state.clone_from(&instance.initial);
    scratch.visited.clear();
    let state = &mut scratch.state;
    let visited = &mut scratch.visited;

    let mut pc: usize = 0;
    let mut pc_reached: usize = 0;
    let mut steps: u64 = 0;
    let mut applied: u64 = 0;
    if options.revisit == RevisitPolicy::EveryStep {
        visited.insert(state_signature(state, pc));
    }
    let status = loop {
        match program.line(pc) {
            ProgramLine::Undefined => break ExecStatus::HaltedUndefined(pc),
            ProgramLine::End => {
                break if instance.goal.satisfied_by(state) {
                    ExecStatus::Solved
                } else {
                    ExecStatus::Incorrect
                };
            }
            ProgramLine::Action(id) => {
                if steps == options.max_steps {
                    break ExecStatus::Infinite;
                }
                steps += 1;
                if !apply_op(ctx.actions[id.0 as usize].op, state, specs, ctx.arithmetic_bound) {
                    break ExecStatus::Inapplicable(pc);
                }
                applied += 1;
                if let Some(trace) = trace.as_deref_mut() {
                    trace.push(id);
                }
                pc += 1;
                if options.revisit == RevisitPolicy::EveryStep
                    && !visited.insert(state_signature(state, pc))
                {
                    break ExecStatus::Infinite;
                }
            }
            ProgramLine::Goto { target, feature } => {
                if steps == options.max_steps {
                    break ExecStatus::Infinite;
                }
                steps += 1;
                if feature.holds(state.flag_z, state.flag_c) {
                    pc += 1;
                    if options.revisit == RevisitPolicy::EveryStep
                        && !visited.insert(state_signature(state, pc))
                    {
                        break ExecStatus::Infinite;
                    }
                } else {
                    let backward = target <= pc;
                    pc = target;
                    let check = match options.revisit {
                        RevisitPolicy::EveryStep => true,
                        RevisitPolicy::BackwardJumps => backward,
                        RevisitPolicy::Off => false,
                    };
                    if check && !visited.insert(state_signature(state, pc)) {
                        break ExecStatus::Infinite;
                    }
                }
            }
        }
        if pc > pc_reached {
            pc_reached = pc;
        }
    };
    if pc > pc_reached {
        pc_reached = pc;
    }
    RunResult { status, steps_executed: steps, applied_actions: applied, pc_reached }
}

/// Runs `program` on `instance` and returns the full outcome.
pub fn execute(
    program: &PlanningProgram,
    ctx: ExecContext<'_>,
    instance: &Instance,
    options: &ExecOptions,
) -> ExecutionOutcome {
    let mut scratch = ExecScratch::default();
    let mut trace = Vec::new();
    let result = run(
        program,
        ctx,
        instance,
        options,
        &mut scratch,
        options.record_trace.then_some(&mut trace),
    );
    ExecutionOutcome {
        status: result.status,
        steps_executed: result.steps_executed,
        applied_actions: result.applied_actions,
        pc_reached: result.pc_reached,
        final_state: scratch.state,
        action_trace: trace,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("plan step {step} ({name}) is inapplicable")]
pub struct PlanError {
    pub step: usize,
    pub name: String,
}

/// Applies a straight-line action sequence to the instance's initial state.
/// Returns the final state and the number of applied actions.
pub fn exec_plan(
    plan: &[GroundedAction],
    instance: &Instance,
    arithmetic_bound: i64,
) -> Result<(MachineState, u64), PlanError> {
    let mut state = instance.initial.clone();
    for (step, action) in plan.iter().enumerate() {
        if !apply_op(action.op, &mut state, &instance.variables, arithmetic_bound) {
            return Err(PlanError { step, name: action.name.clone() });
        }
    }
    Ok((state, plan.len() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_action_set, ActionSchema, Instance, PartialState, VariableSpec};
    use crate::program::{parse_program, Feature, PlanningProgram, ProgramLine};

    fn sorting_instance(label: &str, values: &[i64], pointers: &[u32]) -> Instance {
        let vars: Vec<VariableSpec> =
            (0..values.len()).map(|i| VariableSpec::new(format!("x{i}"), 0, 100)).collect();
        let mut goal = PartialState::default();
        let mut sorted = values.to_vec();
        sorted.sort_unstable();
        for (i, v) in sorted.iter().enumerate() {
            goal.assign_register(i, *v);
        }
        let initial = MachineState::new(values.to_vec(), pointers.len());
        let mut inst = Instance::new(label, vars, initial, goal).unwrap();
        for (z, &p) in pointers.iter().enumerate() {
            inst.pin_pointer(z, p as usize);
        }
        inst
    }

    fn two_pointer_actions() -> Vec<crate::model::GroundedAction> {
        let mut actions = build_action_set(2, &[ActionSchema::Swap], false);
        for a in &mut actions {
            a.name = a.name.replace("z1", "i").replace("z2", "j");
        }
        actions
    }

    #[test]
    fn partial_prefix_halts_at_first_undefined_line() {
        let actions = two_pointer_actions();
        let text = "0. swap(*i,*j)\n1. inc(i)\n2. dec(j)\n3. undefined\n4. undefined\n5. end\n";
        let program = parse_program(text, &actions).unwrap();
        let inst = sorting_instance("p1", &[6, 3, 4, 2, 5, 1], &[0, 5]);
        let ctx = ExecContext { actions: &actions, arithmetic_bound: 100 };
        let out = execute(&program, ctx, &inst, &ExecOptions { record_trace: true, ..ExecOptions::validation() });
        assert_eq!(out.status, ExecStatus::HaltedUndefined(3));
        assert_eq!(out.pc_reached, 3);
        assert_eq!(out.applied_actions, 3);
        assert_eq!(out.steps_executed, 3);
        assert_eq!(out.action_trace.len(), 3);
        assert_eq!(out.final_state.registers, vec![1, 3, 4, 2, 5, 6]);
        assert_eq!(out.final_state.pointers, vec![1, 4]);
    }

    #[test]
    fn reversal_loop_solves_and_sets_goal_state() {
        let actions = two_pointer_actions();
        let text = "\
0. swap(*i,*j)
1. inc(i)
2. dec(j)
3. cmp(j,i)
4. goto(0,!(!yz&!yc))
5. end
";
        let program = parse_program(text, &actions).unwrap();
        let ctx = ExecContext { actions: &actions, arithmetic_bound: 100 };
        // Reversing [6,3,4,2,5,1] yields [1,5,2,4,3,6]; use that as the goal.
        let inst = {
            let vars: Vec<VariableSpec> =
                (0..6).map(|i| VariableSpec::new(format!("x{i}"), 0, 100)).collect();
            let mut goal = PartialState::default();
            for (i, v) in [1, 5, 2, 4, 3, 6].iter().enumerate() {
                goal.assign_register(i, *v);
            }
            let initial = MachineState::new(vec![6, 3, 4, 2, 5, 1], 2);
            let mut inst = Instance::new("rev", vars, initial, goal).unwrap();
            inst.pin_pointer(1, 5);
            inst
        };
        let out = execute(&program, ctx, &inst, &ExecOptions::validation());
        assert_eq!(out.status, ExecStatus::Solved);
        assert_eq!(out.final_state.registers, vec![1, 5, 2, 4, 3, 6]);
        assert_eq!(out.pc_reached, 5);
    }

    #[test]
    fn unconditional_self_loop_is_reported_infinite_by_revisits() {
        let actions = build_action_set(1, &[], false);
        // goto(0) from line 0 is rejected by the validating constructor, so
        // build the bent program directly: it never changes state.
        let program = PlanningProgram::from_lines_unchecked(vec![
            ProgramLine::Goto { target: 0, feature: Feature::ZC },
            ProgramLine::End,
        ]);
        let inst = Instance::new(
            "loop",
            vec![VariableSpec::new("x0", 0, 9)],
            MachineState::new(vec![0], 1),
            PartialState::default(),
        )
        .unwrap();
        let ctx = ExecContext { actions: &actions, arithmetic_bound: 9 };
        for revisit in [RevisitPolicy::EveryStep, RevisitPolicy::BackwardJumps] {
            let out = execute(
                &program,
                ctx,
                &inst,
                &ExecOptions { max_steps: 1_000_000, revisit, record_trace: false },
            );
            assert_eq!(out.status, ExecStatus::Infinite);
            assert!(out.steps_executed <= 3, "revisit detection should fire immediately");
        }
    }

    #[test]
    fn step_budget_catches_progressing_loops() {
        let actions = build_action_set(1, &[], false);
        let inc = actions.iter().position(|a| a.name == "inc(z1)").unwrap() as u16;
        // inc forever across a huge domain; revisits never repeat, so only
        // the budget can stop it.
        let program = PlanningProgram::from_lines_unchecked(vec![
            ProgramLine::Action(crate::model::ActionId(inc)),
            ProgramLine::Goto { target: 0, feature: Feature::ZC },
            ProgramLine::End,
        ]);
        let vars: Vec<VariableSpec> =
            (0..50).map(|i| VariableSpec::new(format!("x{i}"), 0, 1)).collect();
        let inst =
            Instance::new("run", vars, MachineState::new(vec![0; 50], 1), PartialState::default())
                .unwrap();
        let ctx = ExecContext { actions: &actions, arithmetic_bound: 1 };
        let out = execute(
            &program,
            ctx,
            &inst,
            &ExecOptions { max_steps: 40, revisit: RevisitPolicy::BackwardJumps, record_trace: false },
        );
        assert_eq!(out.status, ExecStatus::Infinite);
        assert_eq!(out.steps_executed, 40);
    }

    #[test]
    fn end_without_goal_is_incorrect_and_inapplicable_reports_line() {
        let actions = build_action_set(1, &[], false);
        let dec = actions.iter().position(|a| a.name == "dec(z1)").unwrap() as u16;
        let mut goal = PartialState::default();
        goal.assign_register(0, 5);
        let inst = Instance::new(
            "g",
            vec![VariableSpec::new("x0", 0, 9)],
            MachineState::new(vec![0], 1),
            goal,
        )
        .unwrap();
        let ctx = ExecContext { actions: &actions, arithmetic_bound: 9 };

        let empty = PlanningProgram::empty(2);
        let nothing = PlanningProgram::from_lines(vec![
            ProgramLine::Goto { target: 2, feature: Feature::ZC },
            ProgramLine::Undefined,
            ProgramLine::End,
        ])
        .unwrap();
        let out = execute(&nothing, ctx, &inst, &ExecOptions::validation());
        // Flags start false, so the stored feature fails and the goto jumps to end.
        assert_eq!(out.status, ExecStatus::Incorrect);
        assert_eq!(out.status.is_dead_end(), true);
        let out = execute(&empty, ctx, &inst, &ExecOptions::validation());
        assert_eq!(out.status, ExecStatus::HaltedUndefined(0));

        let bad = PlanningProgram::from_lines(vec![
            ProgramLine::Action(crate::model::ActionId(dec)),
            ProgramLine::End,
        ])
        .unwrap();
        let out = execute(&bad, ctx, &inst, &ExecOptions::validation());
        assert_eq!(out.status, ExecStatus::Inapplicable(0));
        assert_eq!(out.applied_actions, 0);
    }

    #[test]
    fn plan_execution_returns_cost_and_flags_failures() {
        let actions = build_action_set(2, &[ActionSchema::Swap], false);
        let pick = |name: &str| actions.iter().find(|a| a.name == name).unwrap().clone();
        let inst = sorting_instance("p", &[3, 1], &[0, 1]);
        let plan = vec![pick("swap(*z1,*z2)")];
        let (state, cost) = exec_plan(&plan, &inst, 100).unwrap();
        assert_eq!(state.registers, vec![1, 3]);
        assert_eq!(cost, 1);

        let bad = vec![pick("dec(z1)")];
        let err = exec_plan(&bad, &inst, 100).unwrap_err();
        assert_eq!(err.step, 0);
        assert_eq!(err.name, "dec(z1)");
    }
}
