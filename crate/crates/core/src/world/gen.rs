//! Seeded scene and task generation.
//!
//! `generate_task` is a pure function of `(seed, task_type)`: the same pair
//! always yields byte-identical task text and initial state. Placement rules
//! are tuned per task family so scripted expert rollouts land near the
//! calibrated per-type lengths.

use super::state::*;
use super::vocab::ObjectClass;
use rand::prelude::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Deterministic 64-bit mixer (splitmix64 finalizer) for deriving disjoint
/// RNG streams.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a
        .wrapping_mul(0x9e37_79b9_7f4a_7c15)
        .wrapping_add(b)
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Fixed vague-phrase table: class and adjective synonyms the instruction
/// generator swaps in with probability one half per slot.
pub const CLASS_SYNONYMS: &[(ObjectClass, &str)] = &[
    (ObjectClass::SideTable, "small black table"),
    (ObjectClass::Mug, "coffee cup"),
    (ObjectClass::DiningTable, "kitchen table"),
    (ObjectClass::Fridge, "refrigerator"),
];

pub const ADJECTIVE_SYNONYMS: &[(&str, &str)] = &[("heated", "warmed"), ("cooled", "chilled")];

pub fn class_synonym(class: ObjectClass) -> Option<&'static str> {
    CLASS_SYNONYMS
        .iter()
        .find(|(c, _)| *c == class)
        .map(|(_, s)| *s)
}

/// A generated scenario: the task plus the initial latent state.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub task: TaskSpec,
    pub initial: LatentState,
}

impl Scenario {
    pub fn legal_subgoals(&self) -> Vec<SubGoal> {
        super::transition::legal_subgoals(&self.initial.locations())
    }
}

struct SceneBuilder {
    objects: BTreeMap<ObjectId, ObjectState>,
    receptacles: BTreeMap<ObjectId, ReceptacleState>,
    toggles: BTreeMap<ObjectId, ToggleState>,
    counters: BTreeMap<ObjectClass, usize>,
}

impl SceneBuilder {
    fn new() -> Self {
        SceneBuilder {
            objects: BTreeMap::new(),
            receptacles: BTreeMap::new(),
            toggles: BTreeMap::new(),
            counters: BTreeMap::new(),
        }
    }

    fn place(&mut self, class: ObjectClass, location: ObjectLocation) -> ObjectId {
        let n = self.counters.entry(class).or_insert(0);
        *n += 1;
        let id = ObjectId::new(class, *n);
        self.objects.insert(
            id.clone(),
            ObjectState { class, location, temp: Temp::None, clean: false, sliced: false },
        );
        let kind = class.kind();
        if kind.receptacle {
            // Openable receptacles start closed; plain ones always read open.
            self.receptacles
                .insert(id.clone(), ReceptacleState { is_open: !kind.openable });
        }
        if kind.toggleable {
            self.toggles.insert(id.clone(), ToggleState { is_on: false });
        }
        id
    }

    /// True when the location hosts fixed (non-pickupable) receptacle
    /// furniture. Movable receptacles do not count: they can walk away.
    fn has_receptacle_at(&self, loc: &LocationId) -> bool {
        self.objects.values().any(|o| {
            o.class.kind().receptacle
                && !o.class.kind().pickupable
                && matches!(&o.location, ObjectLocation::At(l) if l == loc)
        })
    }

    fn finish(self, agent_location: LocationId) -> LatentState {
        LatentState {
            objects: self.objects,
            receptacles: self.receptacles,
            toggles: self.toggles,
            agent_location,
            inventory: None,
            clock: 0,
        }
    }
}

fn object_pool(task: TaskType) -> &'static [ObjectClass] {
    use ObjectClass::*;
    match task {
        TaskType::Examine => &[Book, Candle, CellPhone, Vase, Watch],
        TaskType::Pick => &[Basketball, Book, Candle, CellPhone, Mug, SoapBottle, SprayBottle, Vase, Watch],
        TaskType::Clean => &[Bowl, Cup, Fork, Ladle, Mug, Pan, Plate, Spoon],
        TaskType::Stack => &[Apple, Egg, Fork, Ladle, Spoon],
        TaskType::PickTwo => &[Book, Candle, Fork, SoapBottle, Spoon, SprayBottle],
        TaskType::Heat => &[Apple, Bread, Egg, Mug, Potato, Tomato],
        TaskType::Cool => &[Apple, Bread, Egg, Mug, Potato, Tomato],
    }
}

fn pick_parent(task: TaskType, rng: &mut ChaCha8Rng) -> ObjectClass {
    use ObjectClass::*;
    match task {
        // Placeholder: the examine goal only cares about the lamp.
        TaskType::Examine => SideTable,
        TaskType::Pick => *[CounterTop, DiningTable, Shelf, SideTable].choose(rng).unwrap(),
        TaskType::Clean => *[CounterTop, DiningTable, Shelf, SideTable].choose(rng).unwrap(),
        TaskType::Stack => {
            if rng.random_range(0..4) < 3 {
                Cabinet
            } else {
                CounterTop
            }
        }
        TaskType::PickTwo => {
            if rng.random_bool(0.5) {
                *[Cabinet, Drawer].choose(rng).unwrap()
            } else {
                *[DiningTable, SideTable].choose(rng).unwrap()
            }
        }
        TaskType::Heat => {
            if rng.random_range(0..4) == 0 {
                Fridge
            } else {
                *[CounterTop, DiningTable, SideTable].choose(rng).unwrap()
            }
        }
        TaskType::Cool => *[CounterTop, DiningTable, SideTable].choose(rng).unwrap(),
    }
}

/// Distractor candidates: pickupable classes that cannot collide with the
/// task's own classes or with vague-phrase resolution (a Cup distractor in a
/// Mug task would make "coffee cup" genuinely ambiguous).
fn distractor_pool(pddl: &PddlArgs) -> Vec<ObjectClass> {
    let mut excluded = vec![pddl.object_target];
    if let Some(m) = pddl.mrecep_target {
        excluded.push(m);
    }
    match pddl.object_target {
        ObjectClass::Mug => excluded.push(ObjectClass::Cup),
        ObjectClass::Cup => excluded.push(ObjectClass::Mug),
        _ => {}
    }
    ObjectClass::ALL
        .iter()
        .copied()
        .filter(|c| c.kind().pickupable && !excluded.contains(c))
        .collect()
}

/// Generate a solvable scenario for `(seed, task_type)`.
pub fn generate_task(seed: u64, task_type: TaskType) -> (TaskSpec, LatentState) {
    let scenario = generate_scenario(seed, task_type);
    (scenario.task, scenario.initial)
}

pub fn generate_scenario(seed: u64, task_type: TaskType) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, task_type.index()));

    let n_locs = rng.random_range(4..=8usize);
    let locs: Vec<LocationId> = (0..n_locs).map(LocationId::new).collect();
    let start = locs[0].clone();
    let non_start = |rng: &mut ChaCha8Rng| locs[rng.random_range(1..n_locs)].clone();

    let object_target = *object_pool(task_type).choose(&mut rng).unwrap();
    let parent_target = pick_parent(task_type, &mut rng);
    let mrecep_target = if task_type == TaskType::Stack {
        Some(*[ObjectClass::Bowl, ObjectClass::Pan, ObjectClass::Plate].choose(&mut rng).unwrap())
    } else {
        None
    };

    let pddl = PddlArgs {
        task_type,
        object_target,
        parent_target,
        mrecep_target,
        toggle_target: if task_type == TaskType::Examine {
            Some(ObjectClass::DeskLamp)
        } else {
            None
        },
        object_state: ObjectStateGoal::for_task(task_type),
        object_sliced: false,
        two_object: task_type == TaskType::PickTwo,
    };
    debug_assert!(pddl.validate().is_ok());

    let mut builder = SceneBuilder::new();

    // Task-specific placement. Object/fixture locations drive the expert
    // sub-goal counts, so the co-location coin flips here are deliberate.
    let parent_loc;
    match task_type {
        TaskType::Examine => {
            builder.place(object_target, ObjectLocation::At(start.clone()));
            let lamp_loc = if rng.random_range(0..4) < 3 { start.clone() } else { non_start(&mut rng) };
            builder.place(ObjectClass::DeskLamp, ObjectLocation::At(lamp_loc));
            parent_loc = non_start(&mut rng);
        }
        TaskType::Pick => {
            builder.place(object_target, ObjectLocation::At(start.clone()));
            parent_loc = if rng.random_bool(0.5) { start.clone() } else { non_start(&mut rng) };
        }
        TaskType::PickTwo => {
            builder.place(object_target, ObjectLocation::At(start.clone()));
            builder.place(object_target, ObjectLocation::At(start.clone()));
            parent_loc = if rng.random_bool(0.5) { start.clone() } else { non_start(&mut rng) };
        }
        TaskType::Stack => {
            builder.place(object_target, ObjectLocation::At(start.clone()));
            builder.place(mrecep_target.unwrap(), ObjectLocation::At(start.clone()));
            parent_loc = non_start(&mut rng);
        }
        TaskType::Clean => {
            builder.place(object_target, ObjectLocation::At(start.clone()));
            let sink_loc = if rng.random_range(0..4) == 0 { start.clone() } else { non_start(&mut rng) };
            builder.place(ObjectClass::Sink, ObjectLocation::At(sink_loc.clone()));
            builder.place(ObjectClass::Faucet, ObjectLocation::At(sink_loc.clone()));
            parent_loc = if rng.random_bool(0.5) {
                sink_loc
            } else {
                let others: Vec<&LocationId> = locs.iter().filter(|l| **l != sink_loc).collect();
                (*others[rng.random_range(0..others.len())]).clone()
            };
        }
        TaskType::Cool => {
            builder.place(object_target, ObjectLocation::At(start.clone()));
            let fridge_loc = non_start(&mut rng);
            if parent_target != ObjectClass::Fridge {
                builder.place(ObjectClass::Fridge, ObjectLocation::At(fridge_loc.clone()));
            }
            let others: Vec<&LocationId> = locs.iter().filter(|l| **l != fridge_loc).collect();
            parent_loc = (*others[rng.random_range(0..others.len())]).clone();
        }
        TaskType::Heat => {
            let obj_loc = non_start(&mut rng);
            builder.place(object_target, ObjectLocation::At(obj_loc.clone()));
            let micro_candidates: Vec<&LocationId> =
                locs.iter().skip(1).filter(|l| **l != obj_loc).collect();
            let micro_loc = (*micro_candidates[rng.random_range(0..micro_candidates.len())]).clone();
            builder.place(ObjectClass::Microwave, ObjectLocation::At(micro_loc.clone()));
            let parent_candidates: Vec<&LocationId> =
                locs.iter().filter(|l| **l != micro_loc).collect();
            parent_loc = (*parent_candidates[rng.random_range(0..parent_candidates.len())]).clone();
        }
    }
    builder.place(parent_target, ObjectLocation::At(parent_loc));

    // A desk lamp shows up in some non-examine scenes as flavor.
    if task_type != TaskType::Examine && rng.random_range(0..4) == 0 {
        let lamp_loc = non_start(&mut rng);
        builder.place(ObjectClass::DeskLamp, ObjectLocation::At(lamp_loc));
    }

    // Anchor receptacles: every location hosts at least one receptacle so a
    // mis-held object can always be put down somewhere. One instance per
    // class keeps class-level navigation unambiguous.
    let mut anchor_pool: Vec<ObjectClass> = [
        ObjectClass::Cabinet,
        ObjectClass::CoffeeMachine,
        ObjectClass::CounterTop,
        ObjectClass::DiningTable,
        ObjectClass::Drawer,
        ObjectClass::GarbageCan,
        ObjectClass::Shelf,
        ObjectClass::SideTable,
    ]
    .into_iter()
    .filter(|c| builder.counters.get(c).copied().unwrap_or(0) == 0)
    .collect();
    for loc in &locs {
        if !builder.has_receptacle_at(loc) {
            let idx = rng.random_range(0..anchor_pool.len());
            let class = anchor_pool.remove(idx);
            builder.place(class, ObjectLocation::At(loc.clone()));
        }
    }

    // Distractors: unrelated pickupable classes, sometimes tucked inside a
    // receptacle at their location.
    let pool = distractor_pool(&pddl);
    let base_count = builder.objects.len();
    let min_distractors = 3.max(10usize.saturating_sub(base_count));
    let n_distractors = rng.random_range(min_distractors..=8.max(min_distractors));
    let mut chosen: Vec<ObjectClass> = Vec::new();
    let mut pool_left = pool;
    for _ in 0..n_distractors.min(pool_left.len()) {
        let idx = rng.random_range(0..pool_left.len());
        chosen.push(pool_left.remove(idx));
    }
    for class in chosen {
        let loc = locs[rng.random_range(0..n_locs)].clone();
        let tuck = rng.random_range(0..10) < 3;
        let receptacle_here: Option<ObjectId> = builder
            .objects
            .iter()
            .filter(|(_, o)| {
                o.class.kind().receptacle
                    && !o.class.kind().pickupable
                    && matches!(&o.location, ObjectLocation::At(l) if *l == loc)
            })
            .map(|(id, _)| id.clone())
            .next();
        match (tuck, receptacle_here) {
            (true, Some(recep)) => {
                builder.place(class, ObjectLocation::In(recep));
            }
            _ => {
                builder.place(class, ObjectLocation::At(loc));
            }
        }
    }

    let state = builder.finish(start);
    debug_assert!(state.objects.len() >= 10 && state.objects.len() <= 25);

    let instruction = render_instruction(&pddl, seed);
    Scenario { task: TaskSpec { pddl, instruction, scene_seed: seed }, initial: state }
}

fn slot_word(rng: &mut ChaCha8Rng, class: ObjectClass) -> String {
    let vague = rng.random_bool(0.5);
    match (vague, class_synonym(class)) {
        (true, Some(s)) => s.to_string(),
        _ => class.spoken_name(),
    }
}

fn slot_adjective(rng: &mut ChaCha8Rng, plain: &str) -> String {
    let vague = rng.random_bool(0.5);
    let alt = ADJECTIVE_SYNONYMS.iter().find(|(p, _)| *p == plain).map(|(_, a)| *a);
    match (vague, alt) {
        (true, Some(a)) => a.to_string(),
        _ => plain.to_string(),
    }
}

/// Render the (possibly vague) natural instruction. Depends only on the
/// task arguments and the scene seed, so the text is reproducible.
pub fn render_instruction(pddl: &PddlArgs, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0x5eed_1e47));
    let obj = slot_word(&mut rng, pddl.object_target);
    let parent = slot_word(&mut rng, pddl.parent_target);
    let prep = pddl.parent_target.preposition();
    match pddl.task_type {
        TaskType::Examine => format!("Look at a {obj} under the desk lamp"),
        TaskType::Pick => format!("Put a {obj} {prep} the {parent}"),
        TaskType::Clean => format!("Wash a {obj} and put it {prep} the {parent}"),
        TaskType::Stack => {
            let mrecep = slot_word(&mut rng, pddl.mrecep_target.unwrap_or(ObjectClass::Plate));
            format!("Place a {mrecep} with a {obj} on it {prep} the {parent}")
        }
        TaskType::PickTwo => format!("Put two {obj}s {prep} the {parent}"),
        TaskType::Heat => {
            let adj = slot_adjective(&mut rng, "heated");
            format!("Put a {adj} {obj} {prep} the {parent}")
        }
        TaskType::Cool => {
            let adj = slot_adjective(&mut rng, "cooled");
            format!("Put a {adj} {obj} {prep} the {parent}")
        }
    }
}
