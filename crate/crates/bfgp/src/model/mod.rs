//! Core state model: registers, pointers, flags, grounded actions, instances
//! and plan translation between the plain and pointer formulations.

mod action;
mod instance;
mod state;
mod translate;

pub use action::{
    ActionId, ActionKind, ActionOp, ActionSchema, GroundedAction, Inapplicable, apply_action,
    apply_ram, build_action_set, ground_actions, CARRIED,
};
pub(crate) use action::apply_op;
pub use instance::{
    extend_instance, parse_instance, write_instance, GPProblem, Instance, InstanceError,
    InstanceParseError,
};
pub use state::{update_flags, MachineState, PartialState, VariableSpec};
pub use translate::{translate_plan_backward, translate_plan_forward, PlainAction, TranslateError};
