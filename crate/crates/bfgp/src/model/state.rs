//! Machine states: integer registers, pointers into the register file, and
//! the two comparison flags shared by every interpreted instruction.

use std::collections::BTreeMap;

/// Declared bounds for one register. Writes outside `[min, max]` make the
/// writing action inapplicable instead of clamping.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct VariableSpec {
    pub name: String,
    pub min: i64,
    pub max: i64,
}

impl VariableSpec {
    pub fn new(name: impl Into<String>, min: i64, max: i64) -> Self {
        VariableSpec { name: name.into(), min, max }
    }

    pub fn contains(&self, value: i64) -> bool {
        self.min <= value && value <= self.max
    }
}

/// Zero flag / carry flag pair produced by every interpreted instruction.
///
/// For an instruction result `res`: `flag_z == (res == 0)` and
/// `flag_c == (res > 0)`. Planning actions leave both flags untouched.
pub fn update_flags(res: i64) -> (bool, bool) {
    (res == 0, res > 0)
}

/// A full machine state: register contents, pointer positions and flags.
///
/// Pointers are register indices and must stay in `[0, registers.len() - 1]`;
/// the instruction semantics enforce this by making out-of-range pointer
/// moves inapplicable.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct MachineState {
    pub registers: Vec<i64>,
    pub pointers: Vec<u32>,
    pub flag_z: bool,
    pub flag_c: bool,
}

impl MachineState {
    /// Fresh state with all pointers parked on register 0 and flags cleared.
    pub fn new(registers: Vec<i64>, pointer_count: usize) -> Self {
        MachineState {
            registers,
            pointers: vec![0; pointer_count],
            flag_z: false,
            flag_c: false,
        }
    }

    pub fn register_count(&self) -> usize {
        self.registers.len()
    }

    /// Register currently referenced by pointer `z`.
    pub fn deref(&self, z: usize) -> i64 {
        self.registers[self.pointers[z] as usize]
    }

    pub(crate) fn set_flags(&mut self, res: i64) {
        let (z, c) = update_flags(res);
        self.flag_z = z;
        self.flag_c = c;
    }
}

/// A partial assignment over registers and pointers, used for goal
/// conditions. Pointer goals exist because some tasks (e.g. selecting an
/// index) leave every register untouched and are only observable through a
/// pointer's final position.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PartialState {
    pub registers: BTreeMap<usize, i64>,
    pub pointers: BTreeMap<usize, i64>,
}

impl PartialState {
    pub fn is_empty(&self) -> bool {
        self.registers.is_empty() && self.pointers.is_empty()
    }

    pub fn assign_register(&mut self, index: usize, value: i64) {
        self.registers.insert(index, value);
    }

    pub fn assign_pointer(&mut self, index: usize, value: i64) {
        self.pointers.insert(index, value);
    }

    /// True when every assigned variable holds its goal value in `state`.
    pub fn satisfied_by(&self, state: &MachineState) -> bool {
        self.registers.iter().all(|(&i, &v)| state.registers[i] == v)
            && self.pointers.iter().all(|(&z, &v)| i64::from(state.pointers[z]) == v)
    }

    /// Sum of squared distances between `state` and the goal values, over
    /// goal-assigned variables only. Saturates instead of overflowing so it
    /// stays usable as an ordering key on arbitrary states.
    pub fn squared_distance(&self, state: &MachineState) -> u64 {
        let mut total: u64 = 0;
        for (&i, &v) in &self.registers {
            let d = state.registers[i].saturating_sub(v).unsigned_abs();
            total = total.saturating_add(d.saturating_mul(d));
        }
        for (&z, &v) in &self.pointers {
            let d = i64::from(state.pointers[z]).saturating_sub(v).unsigned_abs();
            total = total.saturating_add(d.saturating_mul(d));
        }
        total
    }
}
