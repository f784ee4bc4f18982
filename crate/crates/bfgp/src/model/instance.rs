//! Planning instances and bundles of instances sharing one action table.
//!
//! Also hosts the plain-text instance format used by the CLI:
//!
//! ```text
//! # optional comments
//! vars <count>
//! var <name> <min> <max> <initial>
//! pointer <name> <initial>      (optional; pointers default to 0)
//! goal <name> <value>           (register or pointer name)
//! ```

use std::fmt::Write as _;

use super::action::GroundedAction;
use super::state::{MachineState, PartialState, VariableSpec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance `{label}`: register `{name}` initial value {value} outside [{min}, {max}]")]
    InitialOutsideDomain { label: String, name: String, value: i64, min: i64, max: i64 },
    #[error("instance `{label}`: goal value {value} for `{name}` outside [{min}, {max}]")]
    GoalOutsideDomain { label: String, name: String, value: i64, min: i64, max: i64 },
    #[error("instance `{label}`: {0} registers declared but {1} initial values given", .declared, .given)]
    RegisterCountMismatch { label: String, declared: usize, given: usize },
    #[error("instance `{label}`: goal references register {index} but only {count} exist")]
    GoalRegisterOutOfRange { label: String, index: usize, count: usize },
    #[error("instance `{label}`: pointer {index} initialized to {value}, outside the register file")]
    PointerOutOfRange { label: String, index: usize, value: i64 },
}

/// One classical planning instance over the extended (pointer) state space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub label: String,
    pub variables: Vec<VariableSpec>,
    pub initial: MachineState,
    pub goal: PartialState,
}

impl Instance {
    /// Validating constructor; use [`extend_instance`] when starting from a
    /// plain register-machine instance.
    pub fn new(
        label: impl Into<String>,
        variables: Vec<VariableSpec>,
        initial: MachineState,
        goal: PartialState,
    ) -> Result<Self, InstanceError> {
        let label = label.into();
        if variables.len() != initial.registers.len() {
            return Err(InstanceError::RegisterCountMismatch {
                label,
                declared: variables.len(),
                given: initial.registers.len(),
            });
        }
        for (spec, &v) in variables.iter().zip(&initial.registers) {
            if !spec.contains(v) {
                return Err(InstanceError::InitialOutsideDomain {
                    label,
                    name: spec.name.clone(),
                    value: v,
                    min: spec.min,
                    max: spec.max,
                });
            }
        }
        for (z, &p) in initial.pointers.iter().enumerate() {
            if p as usize >= variables.len() {
                return Err(InstanceError::PointerOutOfRange { label, index: z, value: i64::from(p) });
            }
        }
        for (&i, &v) in &goal.registers {
            let Some(spec) = variables.get(i) else {
                return Err(InstanceError::GoalRegisterOutOfRange {
                    label,
                    index: i,
                    count: variables.len(),
                });
            };
            if !spec.contains(v) {
                return Err(InstanceError::GoalOutsideDomain {
                    label,
                    name: spec.name.clone(),
                    value: v,
                    min: spec.min,
                    max: spec.max,
                });
            }
        }
        for (&z, &v) in &goal.pointers {
            if z >= initial.pointers.len() || v < 0 || v as usize >= variables.len() {
                return Err(InstanceError::PointerOutOfRange { label, index: z, value: v });
            }
        }
        Ok(Instance { label, variables, initial, goal })
    }

    pub fn register_count(&self) -> usize {
        self.variables.len()
    }

    pub fn pointer_count(&self) -> usize {
        self.initial.pointers.len()
    }

    /// Pins one pointer's initial position (used for constant pointers such
    /// as a tail anchor). Panics if out of range, which generator code treats
    /// as a bug.
    pub fn pin_pointer(&mut self, z: usize, register_index: usize) {
        assert!(register_index < self.register_count());
        self.initial.pointers[z] = register_index as u32;
    }
}

/// Extends a plain register-machine instance with `pointer_count` pointers
/// and the two flags. Pointers start on register 0; flags start false.
pub fn extend_instance(
    label: impl Into<String>,
    variables: Vec<VariableSpec>,
    initial_registers: Vec<i64>,
    goal: PartialState,
    pointer_count: usize,
) -> Result<Instance, InstanceError> {
    Instance::new(label, variables, MachineState::new(initial_registers, pointer_count), goal)
}

/// A generalized planning problem: instances sharing a pointer set, one
/// grounded action table and an arithmetic bound.
#[derive(Debug, Clone)]
pub struct GPProblem {
    pub instances: Vec<Instance>,
    pub actions: Vec<GroundedAction>,
    pub pointer_names: Vec<String>,
    pub arithmetic_bound: i64,
}

impl GPProblem {
    pub fn new(
        instances: Vec<Instance>,
        actions: Vec<GroundedAction>,
        pointer_names: Vec<String>,
        arithmetic_bound: i64,
    ) -> Self {
        for inst in &instances {
            assert_eq!(
                inst.pointer_count(),
                pointer_names.len(),
                "instance `{}` disagrees with the problem's pointer set",
                inst.label
            );
        }
        GPProblem { instances, actions, pointer_names, arithmetic_bound }
    }

    pub fn pointer_count(&self) -> usize {
        self.pointer_names.len()
    }

    pub fn action_by_name(&self, name: &str) -> Option<(usize, &GroundedAction)> {
        self.actions.iter().enumerate().find(|(_, a)| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct InstanceParseError {
    pub line: usize,
    pub message: String,
}

fn parse_err(line: usize, message: impl Into<String>) -> InstanceParseError {
    InstanceParseError { line, message: message.into() }
}

/// Renders an instance in the plain-text format. `pointer_names` supplies the
/// names for pointer lines and pointer goals.
pub fn write_instance(inst: &Instance, pointer_names: &[String]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "vars {}", inst.variables.len());
    for (spec, &v) in inst.variables.iter().zip(&inst.initial.registers) {
        let _ = writeln!(out, "var {} {} {} {}", spec.name, spec.min, spec.max, v);
    }
    for (z, &p) in inst.initial.pointers.iter().enumerate() {
        let _ = writeln!(out, "pointer {} {}", pointer_names[z], p);
    }
    for (&i, &v) in &inst.goal.registers {
        let _ = writeln!(out, "goal {} {}", inst.variables[i].name, v);
    }
    for (&z, &v) in &inst.goal.pointers {
        let _ = writeln!(out, "goal {} {}", pointer_names[z], v);
    }
    out
}

/// Parses the plain-text instance format. Register goals are resolved
/// against variable names first, then pointer names.
pub fn parse_instance(text: &str, label: impl Into<String>) -> Result<Instance, InstanceParseError> {
    let mut declared: Option<usize> = None;
    let mut variables: Vec<VariableSpec> = Vec::new();
    let mut registers: Vec<i64> = Vec::new();
    let mut pointer_names: Vec<String> = Vec::new();
    let mut pointers: Vec<u32> = Vec::new();
    let mut goals: Vec<(String, i64, usize)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let keyword = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        let int = |s: &str, what: &str| -> Result<i64, InstanceParseError> {
            s.parse::<i64>().map_err(|_| parse_err(lineno, format!("invalid {what} `{s}`")))
        };
        match keyword {
            "vars" => {
                if declared.is_some() {
                    return Err(parse_err(lineno, "duplicate `vars` line"));
                }
                let [count] = rest.as_slice() else {
                    return Err(parse_err(lineno, "expected `vars <count>`"));
                };
                declared = Some(int(count, "count")? as usize);
            }
            "var" => {
                let [name, min, max, init] = rest.as_slice() else {
                    return Err(parse_err(lineno, "expected `var <name> <min> <max> <initial>`"));
                };
                variables.push(VariableSpec::new(*name, int(min, "min")?, int(max, "max")?));
                registers.push(int(init, "initial value")?);
            }
            "pointer" => {
                let [name, init] = rest.as_slice() else {
                    return Err(parse_err(lineno, "expected `pointer <name> <initial>`"));
                };
                pointer_names.push((*name).to_string());
                let v = int(init, "pointer position")?;
                if v < 0 || v > u32::MAX.into() {
                    return Err(parse_err(lineno, format!("pointer position {v} out of range")));
                }
                pointers.push(v as u32);
            }
            "goal" => {
                let [name, value] = rest.as_slice() else {
                    return Err(parse_err(lineno, "expected `goal <name> <value>`"));
                };
                goals.push(((*name).to_string(), int(value, "goal value")?, lineno));
            }
            other => return Err(parse_err(lineno, format!("unknown keyword `{other}`"))),
        }
    }

    let declared = declared.ok_or_else(|| parse_err(text.lines().count().max(1), "missing `vars` header"))?;
    if declared != variables.len() {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("`vars {declared}` declared but {} `var` lines found", variables.len()),
        ));
    }

    let mut goal = PartialState::default();
    for (name, value, lineno) in goals {
        if let Some(i) = variables.iter().position(|s| s.name == name) {
            goal.assign_register(i, value);
        } else if let Some(z) = pointer_names.iter().position(|n| *n == name) {
            goal.assign_pointer(z, value);
        } else {
            return Err(parse_err(lineno, format!("goal references unknown name `{name}`")));
        }
    }

    let state = MachineState { registers, pointers, flag_z: false, flag_c: false };
    Instance::new(label, variables, state, goal)
        .map_err(|e| parse_err(text.lines().count().max(1), e.to_string()))
}
