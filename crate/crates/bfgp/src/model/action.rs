//! The grounded instruction set: pointer-machine instructions shared by all
//! tasks plus task-specific planning schemas, and the enumeration that
//! grounds both over a pointer set.

use super::state::{MachineState, VariableSpec};

/// Index of a grounded action inside its problem's action table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u16);

/// Planning action schemas. These are the domain-supplied operators; unlike
/// the pointer-machine instructions they never touch the flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionSchema {
    /// `swap(*z1,*z2)`: exchange the two referenced registers (symmetric).
    Swap,
    /// `add(*z1,*z2)`: add the second referenced register into the first.
    Add,
    /// `left(*z1)` / `right(*z1)`: decrement / increment the referenced
    /// register within its domain (one-dimensional movement).
    Left,
    Right,
    /// `pick(*z1)` / `drop(*z1)`: carry / release the object indexed by the
    /// pointer; the last register holds the robot's room.
    Pick,
    Drop,
    /// `moveAB()` / `moveBA()`: move the robot between the two rooms.
    MoveAb,
    MoveBa,
}

impl ActionSchema {
    pub fn name(self) -> &'static str {
        match self {
            ActionSchema::Swap => "swap",
            ActionSchema::Add => "add",
            ActionSchema::Left => "left",
            ActionSchema::Right => "right",
            ActionSchema::Pick => "pick",
            ActionSchema::Drop => "drop",
            ActionSchema::MoveAb => "moveAB",
            ActionSchema::MoveBa => "moveBA",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            ActionSchema::Swap | ActionSchema::Add => 2,
            ActionSchema::Left | ActionSchema::Right | ActionSchema::Pick | ActionSchema::Drop => 1,
            ActionSchema::MoveAb | ActionSchema::MoveBa => 0,
        }
    }

    /// Symmetric schemas are grounded over unordered pointer pairs only.
    pub fn symmetric(self) -> bool {
        matches!(self, ActionSchema::Swap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Planning,
    Ram,
}

/// Fully resolved operation of one grounded action. Pointer parameters are
/// stored as pointer indices, not register indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionOp {
    /// `inc(z)` / `dec(z)`: move a pointer; result is the new position.
    IncPtr(u8),
    DecPtr(u8),
    /// `inc(*z)` / `dec(*z)`: adjust the referenced register; result is the
    /// new content.
    IncDeref(u8),
    DecDeref(u8),
    /// `set(z1,z2)`: copy pointer `z2` into `z1`; result is the copied value.
    SetPtr { dst: u8, src: u8 },
    /// `cmp(z1,z2)`: result is `z1 - z2`; flags only.
    CmpPtr { a: u8, b: u8 },
    /// `cmp(*z1,*z2)`: result is `*z1 - *z2`; flags only.
    CmpDeref { a: u8, b: u8 },
    /// A grounded planning schema with up to two pointer parameters.
    Planning { schema: ActionSchema, params: [u8; 2] },
}

/// One entry of a problem's action table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundedAction {
    pub name: String,
    pub kind: ActionKind,
    pub op: ActionOp,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("action `{0}` is not applicable")]
pub struct Inapplicable(pub String);

impl GroundedAction {
    /// Pure application: returns the successor state or `Inapplicable`.
    pub fn apply(
        &self,
        state: &MachineState,
        specs: &[VariableSpec],
        arithmetic_bound: i64,
    ) -> Result<MachineState, Inapplicable> {
        let mut next = state.clone();
        if apply_op(self.op, &mut next, specs, arithmetic_bound) {
            Ok(next)
        } else {
            Err(Inapplicable(self.name.clone()))
        }
    }
}

/// Pure application of a pointer-machine instruction (`kind == Ram`).
pub fn apply_ram(
    instr: &GroundedAction,
    state: &MachineState,
    specs: &[VariableSpec],
    arithmetic_bound: i64,
) -> Result<MachineState, Inapplicable> {
    debug_assert_eq!(instr.kind, ActionKind::Ram);
    instr.apply(state, specs, arithmetic_bound)
}

/// Pure application of a grounded planning action (`kind == Planning`).
pub fn apply_action(
    action: &GroundedAction,
    state: &MachineState,
    specs: &[VariableSpec],
    arithmetic_bound: i64,
) -> Result<MachineState, Inapplicable> {
    debug_assert_eq!(action.kind, ActionKind::Planning);
    action.apply(state, specs, arithmetic_bound)
}

/// In-place application; returns `false` (leaving `state` unchanged) when the
/// operation is inapplicable. This is the interpreter's hot path.
pub(crate) fn apply_op(
    op: ActionOp,
    state: &mut MachineState,
    specs: &[VariableSpec],
    arithmetic_bound: i64,
) -> bool {
    let reg_count = state.registers.len() as u32;
    match op {
        ActionOp::IncPtr(z) => {
            let p = state.pointers[z as usize] + 1;
            if p >= reg_count {
                return false;
            }
            state.pointers[z as usize] = p;
            state.set_flags(i64::from(p));
        }
        ActionOp::DecPtr(z) => {
            let p = state.pointers[z as usize];
            if p == 0 {
                return false;
            }
            state.pointers[z as usize] = p - 1;
            state.set_flags(i64::from(p - 1));
        }
        ActionOp::IncDeref(z) => {
            let idx = state.pointers[z as usize] as usize;
            let v = state.registers[idx] + 1;
            if v.abs() > arithmetic_bound || !specs[idx].contains(v) {
                return false;
            }
            state.registers[idx] = v;
            state.set_flags(v);
        }
        ActionOp::DecDeref(z) => {
            let idx = state.pointers[z as usize] as usize;
            let v = state.registers[idx] - 1;
            if v.abs() > arithmetic_bound || !specs[idx].contains(v) {
                return false;
            }
            state.registers[idx] = v;
            state.set_flags(v);
        }
        ActionOp::SetPtr { dst, src } => {
            let v = state.pointers[src as usize];
            state.pointers[dst as usize] = v;
            state.set_flags(i64::from(v));
        }
        ActionOp::CmpPtr { a, b } => {
            let res = i64::from(state.pointers[a as usize]) - i64::from(state.pointers[b as usize]);
            state.set_flags(res);
        }
        ActionOp::CmpDeref { a, b } => {
            let res = state.deref(a as usize) - state.deref(b as usize);
            state.set_flags(res);
        }
        ActionOp::Planning { schema, params } => {
            return apply_schema(schema, params, state, specs, arithmetic_bound);
        }
    }
    true
}

fn apply_schema(
    schema: ActionSchema,
    params: [u8; 2],
    state: &mut MachineState,
    specs: &[VariableSpec],
    arithmetic_bound: i64,
) -> bool {
    match schema {
        ActionSchema::Swap => {
            let i = state.pointers[params[0] as usize] as usize;
            let j = state.pointers[params[1] as usize] as usize;
            if !specs[i].contains(state.registers[j]) || !specs[j].contains(state.registers[i]) {
                return false;
            }
            state.registers.swap(i, j);
        }
        ActionSchema::Add => {
            let dst = state.pointers[params[0] as usize] as usize;
            let src = state.pointers[params[1] as usize] as usize;
            let v = state.registers[dst] + state.registers[src];
            if v.abs() > arithmetic_bound || !specs[dst].contains(v) {
                return false;
            }
            state.registers[dst] = v;
        }
        ActionSchema::Left | ActionSchema::Right => {
            let idx = state.pointers[params[0] as usize] as usize;
            let delta = if schema == ActionSchema::Right { 1 } else { -1 };
            let v = state.registers[idx] + delta;
            if !specs[idx].contains(v) {
                return false;
            }
            state.registers[idx] = v;
        }
        ActionSchema::Pick => {
            // Objects live below the robot-room register (the last one).
            let robot = state.registers.len() - 1;
            let idx = state.pointers[params[0] as usize] as usize;
            if idx >= robot || state.registers[idx] != state.registers[robot] {
                return false;
            }
            state.registers[idx] = CARRIED;
        }
        ActionSchema::Drop => {
            let robot = state.registers.len() - 1;
            let idx = state.pointers[params[0] as usize] as usize;
            if idx >= robot || state.registers[idx] != CARRIED {
                return false;
            }
            state.registers[idx] = state.registers[robot];
        }
        ActionSchema::MoveAb => {
            let robot = state.registers.len() - 1;
            if state.registers[robot] != 0 {
                return false;
            }
            state.registers[robot] = 1;
        }
        ActionSchema::MoveBa => {
            let robot = state.registers.len() - 1;
            if state.registers[robot] != 1 {
                return false;
            }
            state.registers[robot] = 0;
        }
    }
    true
}

/// Object-location value meaning "currently carried" (rooms are 0 and 1).
pub const CARRIED: i64 = 2;

/// Grounds the instruction set over `pointer_count` anonymous pointers
/// (`z1`, `z2`, ...), with no constant pointers. With content variants off
/// the result has exactly `2k^2 + |A'|` actions for `k` pointers and `|A'|`
/// schema groundings.
pub fn build_action_set(
    pointer_count: usize,
    schemas: &[ActionSchema],
    content_incdec: bool,
) -> Vec<GroundedAction> {
    let names: Vec<String> = (1..=pointer_count).map(|i| format!("z{i}")).collect();
    ground_actions(&names, &vec![false; pointer_count], schemas, content_incdec)
}

/// Full grounding over named pointers. `constant[z]` marks read-only anchor
/// pointers: they are excluded from `inc`/`dec` and from the destination slot
/// of `set`, but still participate in comparisons, content variants and
/// schema groundings.
///
/// Enumeration order (stable, relied on for reproducible searches):
/// pointer `inc`s, pointer `dec`s, content `inc`s, content `dec`s (when
/// enabled), `set` pairs row-major, pointer `cmp`s (higher pointer first, one
/// per unordered pair), content `cmp`s likewise, then schema groundings in
/// schema order.
pub fn ground_actions(
    pointer_names: &[String],
    constant: &[bool],
    schemas: &[ActionSchema],
    content_incdec: bool,
) -> Vec<GroundedAction> {
    assert_eq!(pointer_names.len(), constant.len());
    assert!(pointer_names.len() <= u8::MAX as usize, "too many pointers");
    let k = pointer_names.len();
    let mut out = Vec::new();
    let mut push = |name: String, kind: ActionKind, op: ActionOp| {
        out.push(GroundedAction { name, kind, op });
    };

    for z in 0..k {
        if !constant[z] {
            push(format!("inc({})", pointer_names[z]), ActionKind::Ram, ActionOp::IncPtr(z as u8));
        }
    }
    for z in 0..k {
        if !constant[z] {
            push(format!("dec({})", pointer_names[z]), ActionKind::Ram, ActionOp::DecPtr(z as u8));
        }
    }
    if content_incdec {
        for z in 0..k {
            push(format!("inc(*{})", pointer_names[z]), ActionKind::Ram, ActionOp::IncDeref(z as u8));
        }
        for z in 0..k {
            push(format!("dec(*{})", pointer_names[z]), ActionKind::Ram, ActionOp::DecDeref(z as u8));
        }
    }
    for dst in 0..k {
        if constant[dst] {
            continue;
        }
        for src in 0..k {
            if src != dst {
                push(
                    format!("set({},{})", pointer_names[dst], pointer_names[src]),
                    ActionKind::Ram,
                    ActionOp::SetPtr { dst: dst as u8, src: src as u8 },
                );
            }
        }
    }
    // One ordering per unordered pair; the higher pointer goes first, which
    // is the ordering most of the handwritten benchmark programs use.
    for hi in 1..k {
        for lo in 0..hi {
            push(
                format!("cmp({},{})", pointer_names[hi], pointer_names[lo]),
                ActionKind::Ram,
                ActionOp::CmpPtr { a: hi as u8, b: lo as u8 },
            );
        }
    }
    for hi in 1..k {
        for lo in 0..hi {
            push(
                format!("cmp(*{},*{})", pointer_names[hi], pointer_names[lo]),
                ActionKind::Ram,
                ActionOp::CmpDeref { a: hi as u8, b: lo as u8 },
            );
        }
    }

    for &schema in schemas {
        match schema.arity() {
            0 => push(
                format!("{}()", schema.name()),
                ActionKind::Planning,
                ActionOp::Planning { schema, params: [0, 0] },
            ),
            1 => {
                for z in 0..k {
                    push(
                        format!("{}(*{})", schema.name(), pointer_names[z]),
                        ActionKind::Planning,
                        ActionOp::Planning { schema, params: [z as u8, 0] },
                    );
                }
            }
            2 if schema.symmetric() => {
                for hi in 1..k {
                    for lo in 0..hi {
                        push(
                            format!("{}(*{},*{})", schema.name(), pointer_names[lo], pointer_names[hi]),
                            ActionKind::Planning,
                            ActionOp::Planning { schema, params: [lo as u8, hi as u8] },
                        );
                    }
                }
            }
            2 => {
                for a in 0..k {
                    for b in 0..k {
                        if a != b {
                            push(
                                format!("{}(*{},*{})", schema.name(), pointer_names[a], pointer_names[b]),
                                ActionKind::Planning,
                                ActionOp::Planning { schema, params: [a as u8, b as u8] },
                            );
                        }
                    }
                }
            }
            _ => unreachable!("schemas have arity 0..=2"),
        }
    }
    out
}
