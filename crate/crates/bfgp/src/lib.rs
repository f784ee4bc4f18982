//! Synthesis of looping pointer programs over register machines.
//!
//! A *problem* bundles a set of classical instances that share one grounded
//! action table. A *program* is a fixed-length line vector mixing actions,
//! conditional gotos over two arithmetic flags, and undefined placeholder
//! lines. The [`search`] module fills placeholders best-first, ranking
//! candidates with the evaluation functions in [`eval`], until one program
//! solves every instance; [`validator`] then re-runs that program on unseen
//! instances. [`domains`] ships eight ready-made problem families and their
//! known solutions.

pub mod domains;
pub mod eval;
pub mod exec;
pub mod model;
pub mod program;
pub mod search;
pub mod problem_io;
pub mod validator;

pub use domains::{
    make_problem, DomainId, GenError, GenParams, TRAINING_BOUND, TRAINING_SEED, VALIDATION_BOUND,
    VALIDATION_SEED,
};
pub use problem_io::{read_problem_dir, write_problem_dir, ProblemIoError, ProblemManifest};
pub use eval::{evaluate, parse_eval_list, Aggregator, EvalFn, EvaluationRecord, NodeStatus};
pub use exec::{
    exec_plan, execute, ExecContext, ExecOptions, ExecStatus, ExecutionOutcome, PlanError,
    RevisitPolicy,
};
pub use model::{
    build_action_set, extend_instance, ground_actions, parse_instance, translate_plan_backward,
    translate_plan_forward, write_instance, ActionId, ActionSchema, GPProblem, GroundedAction,
    Instance, MachineState, PartialState, VariableSpec,
};
pub use program::{parse_program, Feature, PlanningProgram, ProgramLine};
pub use search::{
    bfgp, resume_from, synthesis_step_budget, SearchConfig, SearchOutcome, SearchStats,
    SolutionLog,
};
pub use validator::{
    make_validation_set, render_csv, render_json, status_token, validate, ValidationMode,
    ValidationReport,
};
