//! The eight built-in benchmark families: two numerical series (triangular
//! sum, fibonacci) and six memory-manipulation tasks (corridor, reverse,
//! select, find, gripper, sorting). Each family fixes a register layout, a
//! pointer roster (some pinned as read-only anchors), an action table, and
//! seeded instance generators for a small training set and a larger
//! held-out validation set, plus a known hand-checked solution program.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::model::{
    ground_actions, ActionSchema, GPProblem, GroundedAction, Instance, InstanceError,
    MachineState, PartialState, VariableSpec,
};
use crate::program::{parse_program, PlanningProgram};

/// Value cap for synthesis-scale instance contents and arithmetic results.
pub const TRAINING_BOUND: i64 = 100;
/// Value cap for validation-scale instance contents and arithmetic results.
pub const VALIDATION_BOUND: i64 = 1_000_000_000;

/// Default seed for the built-in training sets.
pub const TRAINING_SEED: u64 = 0x5EED_0001;
/// Default seed for the built-in validation sets.
pub const VALIDATION_SEED: u64 = 0x5EED_0002;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainId {
    Tsum,
    Corridor,
    Reverse,
    Select,
    Find,
    Fibonacci,
    Gripper,
    Sorting,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("{domain}: invalid size {size}: {detail}")]
    InvalidSize { domain: &'static str, size: usize, detail: String },
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Generation request: `count` instances with sizes evenly spaced across
/// `[min_size, max_size]` (series domains read sizes as term indices).
#[derive(Debug, Clone, Copy)]
pub struct GenParams {
    pub count: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub seed: u64,
    pub arithmetic_bound: i64,
}

impl DomainId {
    pub const ALL: [DomainId; 8] = [
        DomainId::Tsum,
        DomainId::Corridor,
        DomainId::Reverse,
        DomainId::Select,
        DomainId::Find,
        DomainId::Fibonacci,
        DomainId::Gripper,
        DomainId::Sorting,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainId::Tsum => "tsum",
            DomainId::Corridor => "corridor",
            DomainId::Reverse => "reverse",
            DomainId::Select => "select",
            DomainId::Find => "find",
            DomainId::Fibonacci => "fibonacci",
            DomainId::Gripper => "gripper",
            DomainId::Sorting => "sorting",
        }
    }

    pub fn parse(name: &str) -> Result<DomainId, GenError> {
        let lower = name.to_ascii_lowercase();
        DomainId::ALL
            .into_iter()
            .find(|d| d.name() == lower)
            .ok_or_else(|| GenError::UnknownDomain(name.to_string()))
    }

    /// Program length the family is solvable at.
    pub fn default_lines(self) -> usize {
        match self {
            DomainId::Tsum => 5,
            DomainId::Corridor | DomainId::Reverse | DomainId::Select | DomainId::Find => 7,
            DomainId::Fibonacci | DomainId::Gripper => 8,
            DomainId::Sorting => 9,
        }
    }

    pub fn pointer_names(self) -> &'static [&'static str] {
        match self {
            DomainId::Tsum => &["a", "b"],
            DomainId::Corridor => &["i", "gi"],
            DomainId::Reverse | DomainId::Sorting => &["i", "j", "tail"],
            DomainId::Select => &["a", "b", "tail"],
            DomainId::Find => &["a", "target", "accumulator"],
            DomainId::Fibonacci => &["b", "c", "n"],
            DomainId::Gripper => &["left-arm", "right-arm", "robby", "last-obj"],
        }
    }

    /// Pointers pinned to a fixed register and excluded from movement and
    /// set-destination groundings.
    pub fn constant_pointers(self) -> &'static [bool] {
        match self {
            DomainId::Tsum => &[false, false],
            DomainId::Corridor => &[false, true],
            DomainId::Reverse | DomainId::Select | DomainId::Sorting => &[false, false, true],
            DomainId::Find => &[false, true, false],
            DomainId::Fibonacci => &[false, false, true],
            DomainId::Gripper => &[false, false, true, true],
        }
    }

    pub fn schemas(self) -> &'static [ActionSchema] {
        match self {
            DomainId::Tsum | DomainId::Fibonacci => &[ActionSchema::Add],
            DomainId::Corridor => &[ActionSchema::Left, ActionSchema::Right],
            DomainId::Reverse | DomainId::Sorting => &[ActionSchema::Swap],
            DomainId::Select | DomainId::Find => &[],
            DomainId::Gripper => &[
                ActionSchema::Pick,
                ActionSchema::Drop,
                ActionSchema::MoveAb,
                ActionSchema::MoveBa,
            ],
        }
    }

    /// Whether the action table carries `inc(*z)`/`dec(*z)` content
    /// variants; only the triangular sum needs to write through a pointer.
    pub fn content_incdec(self) -> bool {
        matches!(self, DomainId::Tsum)
    }

    pub fn pointer_count(self) -> usize {
        self.pointer_names().len()
    }

    pub fn actions(self) -> Vec<GroundedAction> {
        ground_actions(
            &self.pointer_names().iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            self.constant_pointers(),
            self.schemas(),
            self.content_incdec(),
        )
    }

    /// The hand-checked solution used for interpreter regression tests.
    pub fn reference_solution(self, actions: &[GroundedAction]) -> PlanningProgram {
        parse_program(self.reference_text(), actions)
            .expect("reference programs parse against their own action tables")
    }

    pub fn reference_text(self) -> &'static str {
        match self {
            DomainId::Tsum => {
                "0. inc(b)\n1. add(*a,*b)\n2. dec(*b)\n3. goto(1,!(yz&!yc))\n4. end\n"
            }
            DomainId::Corridor => {
                "0. right(*i)\n1. cmp(*gi,*i)\n2. goto(0,!(!yz&!yc))\n3. left(*i)\n\
                 4. cmp(*gi,*i)\n5. goto(1,!(yz&!yc))\n6. end\n"
            }
            DomainId::Reverse => {
                "0. set(j,tail)\n1. swap(*i,*j)\n2. dec(j)\n3. inc(i)\n4. cmp(j,i)\n\
                 5. goto(1,!(!yz&!yc))\n6. end\n"
            }
            DomainId::Select => {
                "0. inc(a)\n1. cmp(*b,*a)\n2. goto(4,!(!yz&yc))\n3. set(b,a)\n\
                 4. cmp(tail,a)\n5. goto(0,!(yz&!yc))\n6. end\n"
            }
            DomainId::Find => {
                "0. cmp(*target,*a)\n1. goto(3,!(yz&!yc))\n2. inc(accumulator)\n3. inc(a)\n\
                 4. cmp(target,a)\n5. goto(0,!(yz&!yc))\n6. end\n"
            }
            DomainId::Fibonacci => {
                "0. inc(c)\n1. inc(c)\n2. add(*c,*b)\n3. inc(b)\n4. add(*c,*b)\n\
                 5. cmp(n,c)\n6. goto(1,!(yz&!yc))\n7. end\n"
            }
            DomainId::Gripper => {
                "0. pick(*left-arm)\n1. moveAB()\n2. drop(*left-arm)\n3. inc(left-arm)\n\
                 4. moveBA()\n5. cmp(last-obj,left-arm)\n6. goto(0,!(yz&!yc))\n7. end\n"
            }
            DomainId::Sorting => {
                "0. set(i,tail)\n1. swap(*i,*j)\n2. cmp(*j,*i)\n3. goto(6,!(!yz&yc))\n\
                 4. inc(i)\n5. goto(0,!(yz&yc))\n6. dec(i)\n7. goto(1,!(yz&!yc))\n8. end\n"
            }
        }
    }

    /// Canonical synthesis-scale generation request: series domains cover
    /// the first solvable terms, list domains twenty random instances sized
    /// 2 through 21.
    pub fn training_params(self) -> GenParams {
        let (count, min_size, max_size) = match self {
            DomainId::Tsum => (10, 1, 10),
            // Terms 0 and 1 are the fixed seeds, and term 11 would overflow
            // the synthesis value cap, so nine instances remain.
            DomainId::Fibonacci => (9, 2, 10),
            _ => (20, 2, 21),
        };
        GenParams {
            count,
            min_size,
            max_size,
            seed: TRAINING_SEED,
            arithmetic_bound: TRAINING_BOUND,
        }
    }

    pub fn training_problem(self) -> GPProblem {
        make_problem(self, self.training_params())
            .expect("built-in training parameters are valid")
    }

    /// The held-out set. The default is desk-sized; `full` switches to the
    /// complete large-scale sweep (tens of thousands of instances for the
    /// triangular sum, lists up to 50K elements).
    pub fn validation_instances(self, full: bool) -> Vec<Instance> {
        self.validation_instances_seeded(full, VALIDATION_SEED)
    }

    /// As [`validation_instances`](Self::validation_instances) but drawing
    /// random content from the given seed.
    pub fn validation_instances_seeded(self, full: bool, seed: u64) -> Vec<Instance> {
        let bound = VALIDATION_BOUND;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match self {
            DomainId::Tsum => {
                let terms: Vec<usize> = if full {
                    (12..=44_720).collect()
                } else {
                    (1..=447).map(|k| k * 100).chain([44_720]).collect()
                };
                terms.iter().map(|&t| tsum_instance(t, bound)).collect()
            }
            DomainId::Fibonacci => (11..=43).map(|t| fibonacci_instance(t, bound)).collect(),
            DomainId::Corridor => {
                (12..=1_011).map(|len| corridor_instance(len, &mut rng)).collect()
            }
            DomainId::Gripper => (12..=1_011).map(gripper_instance).collect(),
            DomainId::Sorting => {
                (12..=31).map(|len| sorting_instance(len, &mut rng, bound)).collect()
            }
            DomainId::Reverse | DomainId::Select | DomainId::Find => {
                let (lo, hi) = if full { (1_000, 50_000) } else { (100, 5_000) };
                spread_sizes(lo, hi, 50)
                    .into_iter()
                    .map(|len| match self {
                        DomainId::Reverse => reverse_instance(len, &mut rng, bound),
                        DomainId::Select => select_instance(len, &mut rng, bound),
                        DomainId::Find => find_instance(len, &mut rng, bound),
                        _ => unreachable!(),
                    })
                    .collect()
            }
        }
    }

    pub fn validation_problem(self, full: bool) -> GPProblem {
        let names = self.pointer_names().iter().map(|s| s.to_string()).collect();
        GPProblem::new(self.validation_instances(full), self.actions(), names, VALIDATION_BOUND)
    }
}

/// `count` sizes evenly spaced over `[min, max]`, ends included.
fn spread_sizes(min: usize, max: usize, count: usize) -> Vec<usize> {
    if count <= 1 || min == max {
        return vec![min; count.max(1)];
    }
    (0..count).map(|k| min + k * (max - min) / (count - 1)).collect()
}

pub fn make_problem(domain: DomainId, params: GenParams) -> Result<GPProblem, GenError> {
    let GenParams { count, min_size, max_size, seed, arithmetic_bound: bound } = params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_allowed = match domain {
        DomainId::Tsum | DomainId::Gripper => 1,
        DomainId::Fibonacci | DomainId::Corridor => 2,
        _ => 2,
    };
    let mut instances = Vec::with_capacity(count);
    for size in spread_sizes(min_size, max_size, count) {
        if size < min_allowed {
            return Err(GenError::InvalidSize {
                domain: domain.name(),
                size,
                detail: format!("minimum size for this domain is {min_allowed}"),
            });
        }
        let instance = match domain {
            DomainId::Tsum => checked_tsum_instance(size, bound)?,
            DomainId::Corridor => corridor_instance(size, &mut rng),
            DomainId::Reverse => reverse_instance(size, &mut rng, bound),
            DomainId::Select => select_instance(size, &mut rng, bound),
            DomainId::Find => find_instance(size, &mut rng, bound),
            DomainId::Fibonacci => checked_fibonacci_instance(size, bound)?,
            DomainId::Gripper => gripper_instance(size),
            DomainId::Sorting => sorting_instance(size, &mut rng, bound),
        };
        instances.push(instance);
    }
    let names = domain.pointer_names().iter().map(|s| s.to_string()).collect();
    Ok(GPProblem::new(instances, domain.actions(), names, bound))
}

fn uniform_regs(prefix: &str, count: usize, min: i64, max: i64) -> Vec<VariableSpec> {
    (0..count).map(|i| VariableSpec::new(format!("{prefix}{i}"), min, max)).collect()
}

fn triangular(term: usize) -> i64 {
    let t = term as i64;
    t * (t + 1) / 2
}

/// Two cells: an accumulator starting at zero and the term to sum down from.
/// Goal: the accumulator holds the term'th triangular number.
fn tsum_instance(term: usize, bound: i64) -> Instance {
    let vars = uniform_regs("x", 2, -bound, bound);
    let initial = MachineState::new(vec![0, term as i64], 2);
    let mut goal = PartialState::default();
    goal.assign_register(0, triangular(term));
    Instance::new(format!("tsum-{term:05}"), vars, initial, goal)
        .expect("triangular-sum layout is internally consistent")
}

fn checked_tsum_instance(term: usize, bound: i64) -> Result<Instance, GenError> {
    if triangular(term) > bound {
        return Err(GenError::InvalidSize {
            domain: "tsum",
            size: term,
            detail: format!("triangular number {} exceeds the bound {bound}", triangular(term)),
        });
    }
    Ok(tsum_instance(term, bound))
}

/// Position cell and goal cell, both movable only inside the corridor.
fn corridor_instance(length: usize, rng: &mut ChaCha8Rng) -> Instance {
    let top = (length - 1) as i64;
    let vars = vec![
        VariableSpec::new("pos", 0, top),
        VariableSpec::new("goal-pos", 0, top),
    ];
    // The known movement pattern overshoots by one cell before walking back,
    // so start and goal stay below the last cell.
    let start = rng.random_range(0..=top - 1);
    let goal_pos = rng.random_range(0..=top - 1);
    let initial = MachineState::new(vec![start, goal_pos], 2);
    let mut goal = PartialState::default();
    goal.assign_register(0, goal_pos);
    let mut inst = Instance::new(format!("corridor-{length:04}"), vars, initial, goal)
        .expect("corridor layout is internally consistent");
    inst.pin_pointer(1, 1);
    inst
}

/// A list in cells 0..L-1 plus a trailing cell holding the length; `tail`
/// anchors the last list cell.
fn list_instance(
    label: String,
    values: &[i64],
    bound: i64,
    pointer_count: usize,
    goal: PartialState,
) -> Instance {
    let len = values.len();
    let mut registers = values.to_vec();
    registers.push(len as i64);
    let vars = uniform_regs("x", len + 1, 0, bound);
    let initial = MachineState::new(registers, pointer_count);
    let mut inst =
        Instance::new(label, vars, initial, goal).expect("list layout is internally consistent");
    inst.pin_pointer(pointer_count - 1, len - 1);
    inst
}

fn random_values(len: usize, rng: &mut ChaCha8Rng, bound: i64) -> Vec<i64> {
    (0..len).map(|_| rng.random_range(0..=bound)).collect()
}

fn reverse_instance(len: usize, rng: &mut ChaCha8Rng, bound: i64) -> Instance {
    let values = random_values(len, rng, bound);
    let mut goal = PartialState::default();
    for (i, v) in values.iter().rev().enumerate() {
        goal.assign_register(i, *v);
    }
    list_instance(format!("reverse-{len:05}"), &values, bound, 3, goal)
}

fn sorting_instance(len: usize, rng: &mut ChaCha8Rng, bound: i64) -> Instance {
    let values = random_values(len, rng, bound);
    let mut sorted = values.clone();
    sorted.sort_unstable();
    let mut goal = PartialState::default();
    for (i, v) in sorted.iter().enumerate() {
        goal.assign_register(i, *v);
    }
    list_instance(format!("sorting-{len:05}"), &values, bound, 3, goal)
}

/// Goal: pointer `b` parks on the first position holding the minimum.
fn select_instance(len: usize, rng: &mut ChaCha8Rng, bound: i64) -> Instance {
    let values = random_values(len, rng, bound);
    let argmin = values
        .iter()
        .enumerate()
        .min_by_key(|(i, v)| (**v, *i))
        .map(|(i, _)| i)
        .expect("lists are non-empty");
    let mut goal = PartialState::default();
    goal.assign_pointer(1, argmin as i64);
    list_instance(format!("select-{len:05}"), &values, bound, 3, goal)
}

/// The trailing cell holds the sought value (drawn from a random list
/// position, so at least one match exists); the `target` anchor doubles as
/// the one-past-the-end stop for the scan. Extra copies of the sought value
/// are planted so the occurrence count varies across instances — otherwise
/// a program that bumps the counter exactly once would pass every instance
/// without ever scanning. Goal: pointer `accumulator` counts the
/// occurrences.
fn find_instance(len: usize, rng: &mut ChaCha8Rng, bound: i64) -> Instance {
    let mut values = random_values(len, rng, bound);
    let target = values[rng.random_range(0..len)];
    for _ in 0..(len % 3).min(len - 1) {
        let slot = rng.random_range(0..len);
        values[slot] = target;
    }
    let count = values.iter().filter(|v| **v == target).count();
    let mut registers = values.clone();
    registers.push(target);
    let vars = uniform_regs("x", len + 1, 0, bound);
    let initial = MachineState::new(registers, 3);
    let mut goal = PartialState::default();
    goal.assign_pointer(2, count as i64);
    let mut inst = Instance::new(format!("find-{len:05}"), vars, initial, goal)
        .expect("find layout is internally consistent");
    inst.pin_pointer(1, len);
    inst
}

fn fib(k: usize) -> i64 {
    let (mut a, mut b) = (1i64, 1i64);
    for _ in 2..k {
        let next = a + b;
        a = b;
        b = next;
    }
    if k <= 2 {
        1
    } else {
        b
    }
}

/// Cells 0..=T with the two seed ones in front; the program must fill cell k
/// with the (k+1)'th series member for every k ≥ 2. `n` anchors the last
/// cell.
fn fibonacci_instance(term: usize, bound: i64) -> Instance {
    let vars = uniform_regs("x", term + 1, 0, bound);
    let mut registers = vec![0i64; term + 1];
    registers[0] = 1;
    registers[1] = 1;
    let initial = MachineState::new(registers, 3);
    let mut goal = PartialState::default();
    for k in 2..=term {
        goal.assign_register(k, fib(k + 1));
    }
    let mut inst = Instance::new(format!("fibonacci-{term:02}"), vars, initial, goal)
        .expect("fibonacci layout is internally consistent");
    inst.pin_pointer(2, term);
    inst
}

fn checked_fibonacci_instance(term: usize, bound: i64) -> Result<Instance, GenError> {
    if term < 2 {
        return Err(GenError::InvalidSize {
            domain: "fibonacci",
            size: term,
            detail: "terms 0 and 1 are the fixed seed values".to_string(),
        });
    }
    if fib(term + 1) > bound {
        return Err(GenError::InvalidSize {
            domain: "fibonacci",
            size: term,
            detail: format!("series value {} exceeds the bound {bound}", fib(term + 1)),
        });
    }
    Ok(fibonacci_instance(term, bound))
}

/// One cell per ball (0 = room A, 1 = room B, 2 = held) plus the robot's
/// room; both anchors sit on the robot cell, marking one-past-the-last ball.
fn gripper_instance(balls: usize) -> Instance {
    let mut vars = uniform_regs("ball", balls, 0, 2);
    vars.push(VariableSpec::new("robot", 0, 1));
    let initial = MachineState::new(vec![0; balls + 1], 4);
    let mut goal = PartialState::default();
    for ball in 0..balls {
        goal.assign_register(ball, 1);
    }
    let mut inst = Instance::new(format!("gripper-{balls:04}"), vars, initial, goal)
        .expect("gripper layout is internally consistent");
    inst.pin_pointer(2, balls);
    inst.pin_pointer(3, balls);
    inst
}
