//! Plan translation between the plain register-machine view (actions name
//! register indices directly) and the pointer view (actions go through
//! pointers). Sequential plans survive the round trip exactly, which is the
//! backbone of the equivalence property tests.

use super::action::{ActionKind, ActionOp, ActionSchema, GroundedAction, apply_op};
use super::instance::Instance;
use super::state::MachineState;

/// A grounded action of the plain (pointer-free) formulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainAction {
    pub schema: ActionSchema,
    /// Register indices, one per schema parameter.
    pub params: Vec<usize>,
}

impl PlainAction {
    pub fn name(&self) -> String {
        let args: Vec<String> = self.params.iter().map(|p| format!("x{p}")).collect();
        format!("{}({})", self.schema.name(), args.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("step {step}: {action} has arity {arity} but only {pointers} pointers exist")]
    NotEnoughPointers { step: usize, action: String, arity: usize, pointers: usize },
    #[error("step {step}: {action} references register {index} outside the register file")]
    RegisterOutOfRange { step: usize, action: String, index: usize },
    #[error("step {step}: `{action}` is not applicable at its execution point")]
    NotExecutable { step: usize, action: String },
}

fn nav_action(kind_inc: bool, z: usize) -> GroundedAction {
    let name = format!("{}(z{})", if kind_inc { "inc" } else { "dec" }, z + 1);
    let op = if kind_inc { ActionOp::IncPtr(z as u8) } else { ActionOp::DecPtr(z as u8) };
    GroundedAction { name, kind: ActionKind::Ram, op }
}

/// Rewrites a sequential plan over registers into an equivalent plan over
/// pointers: each parameter is routed by walking pointer `z_i` to the named
/// register with `inc`/`dec`, then the schema fires on the pointers. Pointer
/// positions persist across plan steps, so later actions only pay for the
/// remaining distance.
pub fn translate_plan_forward(
    plan: &[PlainAction],
    inst: &Instance,
) -> Result<Vec<GroundedAction>, TranslateError> {
    let pointer_count = inst.pointer_count();
    let reg_count = inst.register_count();
    let mut cursor: Vec<usize> = inst.initial.pointers.iter().map(|&p| p as usize).collect();
    let mut out = Vec::new();

    for (step, action) in plan.iter().enumerate() {
        let arity = action.params.len();
        if arity > pointer_count {
            return Err(TranslateError::NotEnoughPointers {
                step,
                action: action.name(),
                arity,
                pointers: pointer_count,
            });
        }
        for (z, &target) in action.params.iter().enumerate() {
            if target >= reg_count {
                return Err(TranslateError::RegisterOutOfRange { step, action: action.name(), index: target });
            }
            while cursor[z] < target {
                out.push(nav_action(true, z));
                cursor[z] += 1;
            }
            while cursor[z] > target {
                out.push(nav_action(false, z));
                cursor[z] -= 1;
            }
        }
        let mut params = [0u8; 2];
        for (z, _) in action.params.iter().enumerate() {
            params[z] = z as u8;
        }
        out.push(GroundedAction {
            name: {
                let args: Vec<String> =
                    (0..arity).map(|z| format!("*z{}", z + 1)).collect();
                format!("{}({})", action.schema.name(), args.join(","))
            },
            kind: ActionKind::Planning,
            op: ActionOp::Planning { schema: action.schema, params },
        });
    }
    Ok(out)
}

/// Recovers the plain plan from a pointer plan by executing it on the
/// instance and reading, at each planning step, which registers the pointers
/// referenced. Machine instructions (the navigation) drop out.
pub fn translate_plan_backward(
    extended: &[GroundedAction],
    inst: &Instance,
    arithmetic_bound: i64,
) -> Result<Vec<PlainAction>, TranslateError> {
    let mut state: MachineState = inst.initial.clone();
    let mut out = Vec::new();
    for (step, action) in extended.iter().enumerate() {
        if let ActionOp::Planning { schema, params } = action.op {
            let resolved: Vec<usize> = (0..schema.arity())
                .map(|i| state.pointers[params[i] as usize] as usize)
                .collect();
            out.push(PlainAction { schema, params: resolved });
        }
        if !apply_op(action.op, &mut state, &inst.variables, arithmetic_bound) {
            return Err(TranslateError::NotExecutable { step, action: action.name.clone() });
        }
    }
    Ok(out)
}
