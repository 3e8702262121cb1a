//! Core domain types: latent state, observations, sub-goals, task specs.

use super::vocab::ObjectClass;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Identifier of a navigable location, e.g. `loc-0`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LocationId(pub String);

impl LocationId {
    pub fn new(idx: usize) -> Self {
        LocationId(format!("loc-{idx}"))
    }
}

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Identifier of an object instance, e.g. `Apple-1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectId(pub String);

impl ObjectId {
    pub fn new(class: ObjectClass, idx: usize) -> Self {
        ObjectId(format!("{}-{idx}", class.name()))
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Where an object instance currently is. Exactly one of the three.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectLocation {
    At(LocationId),
    In(ObjectId),
    Inventory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Temp {
    None,
    Hot,
    Cold,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectState {
    pub class: ObjectClass,
    pub location: ObjectLocation,
    pub temp: Temp,
    pub clean: bool,
    pub sliced: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceptacleState {
    pub is_open: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToggleState {
    pub is_on: bool,
}

/// Full world state `x`: everything the simulator knows, far more than the
/// agent ever observes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatentState {
    pub objects: BTreeMap<ObjectId, ObjectState>,
    pub receptacles: BTreeMap<ObjectId, ReceptacleState>,
    pub toggles: BTreeMap<ObjectId, ToggleState>,
    pub agent_location: LocationId,
    pub inventory: Option<ObjectId>,
    pub clock: u64,
}

impl LatentState {
    /// All location ids referenced by the scene, sorted.
    pub fn locations(&self) -> Vec<LocationId> {
        let mut locs: BTreeSet<LocationId> = BTreeSet::new();
        locs.insert(self.agent_location.clone());
        for obj in self.objects.values() {
            if let ObjectLocation::At(l) = &obj.location {
                locs.insert(l.clone());
            }
        }
        locs.into_iter().collect()
    }

    /// Classes instantiated in the scene, sorted and deduplicated.
    pub fn scene_classes(&self) -> Vec<ObjectClass> {
        let set: BTreeSet<ObjectClass> = self.objects.values().map(|o| o.class).collect();
        set.into_iter().collect()
    }

    /// Instance ids of a class, in id order.
    pub fn instances_of(&self, class: ObjectClass) -> Vec<ObjectId> {
        self.objects
            .iter()
            .filter(|(_, o)| o.class == class)
            .map(|(id, _)| id.clone())
            .collect()
    }

    /// Resolve an object's containment chain down to a location, or
    /// `None` when the chain ends in the inventory.
    pub fn root_location(&self, id: &ObjectId) -> Option<LocationId> {
        let mut cur = id.clone();
        // Containment chains are short; the guard only protects against
        // malformed hand-built states.
        for _ in 0..self.objects.len() + 1 {
            match &self.objects.get(&cur)?.location {
                ObjectLocation::At(l) => return Some(l.clone()),
                ObjectLocation::Inventory => return None,
                ObjectLocation::In(parent) => cur = parent.clone(),
            }
        }
        None
    }

    /// True when the whole containment chain above `id` is open, i.e. the
    /// object could be touched if the agent stood at its root location.
    pub fn chain_open(&self, id: &ObjectId) -> bool {
        let mut cur = id.clone();
        for _ in 0..self.objects.len() + 1 {
            match self.objects.get(&cur).map(|o| &o.location) {
                Some(ObjectLocation::In(parent)) => {
                    if !self.is_open(parent) {
                        return false;
                    }
                    cur = parent.clone();
                }
                _ => return true,
            }
        }
        true
    }

    /// Openness of a receptacle instance. Non-openable receptacles always
    /// report open.
    pub fn is_open(&self, id: &ObjectId) -> bool {
        match self.receptacles.get(id) {
            Some(r) => r.is_open,
            None => true,
        }
    }

    pub fn is_on(&self, id: &ObjectId) -> bool {
        self.toggles.get(id).map(|t| t.is_on).unwrap_or(false)
    }

    /// Ids of objects directly inside a receptacle instance.
    pub fn contents(&self, recep: &ObjectId) -> Vec<ObjectId> {
        self.objects
            .iter()
            .filter(|(_, o)| matches!(&o.location, ObjectLocation::In(p) if p == recep))
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn held_class(&self) -> Option<ObjectClass> {
        self.inventory
            .as_ref()
            .and_then(|id| self.objects.get(id))
            .map(|o| o.class)
    }
}

/// Why a sub-goal failed. The set is closed; every illegal input maps to
/// one of these.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailReason {
    NotVisible,
    Incompatible,
    OccupiedHands,
    EmptyHands,
    ClosedContainer,
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FailReason::NotVisible => "not_visible",
            FailReason::Incompatible => "incompatible",
            FailReason::OccupiedHands => "occupied_hands",
            FailReason::EmptyHands => "empty_hands",
            FailReason::ClosedContainer => "closed_container",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Failed(FailReason),
}

impl Status {
    pub fn is_ok(&self) -> bool {
        matches!(self, Status::Ok)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Ok => f.write_str("ok"),
            Status::Failed(r) => write!(f, "failed({r})"),
        }
    }
}

/// High-level action verbs. Declared in lexicographic order so the derived
/// `Ord` matches name order, which the planner uses for tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verb {
    CloseObject,
    GotoLocation,
    OpenObject,
    PickupObject,
    PutObject,
    SliceObject,
    ToggleObjectOff,
    ToggleObjectOn,
}

impl Verb {
    pub const ALL: &'static [Verb] = &[
        Verb::CloseObject,
        Verb::GotoLocation,
        Verb::OpenObject,
        Verb::PickupObject,
        Verb::PutObject,
        Verb::SliceObject,
        Verb::ToggleObjectOff,
        Verb::ToggleObjectOn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Verb::CloseObject => "CloseObject",
            Verb::GotoLocation => "GotoLocation",
            Verb::OpenObject => "OpenObject",
            Verb::PickupObject => "PickupObject",
            Verb::PutObject => "PutObject",
            Verb::SliceObject => "SliceObject",
            Verb::ToggleObjectOff => "ToggleObjectOff",
            Verb::ToggleObjectOn => "ToggleObjectOn",
        }
    }

    /// Whether `class` is an acceptable argument for this verb.
    pub fn accepts(self, class: ObjectClass) -> bool {
        let k = class.kind();
        match self {
            Verb::GotoLocation => true,
            Verb::PickupObject | Verb::SliceObject => k.pickupable,
            Verb::PutObject => k.receptacle,
            Verb::OpenObject | Verb::CloseObject => k.openable,
            Verb::ToggleObjectOn | Verb::ToggleObjectOff => k.toggleable,
        }
    }
}

impl fmt::Display for Verb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Argument of a sub-goal: an object class or a raw location.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubGoalArg {
    Class(ObjectClass),
    Location(LocationId),
}

impl SubGoalArg {
    pub fn text(&self) -> String {
        match self {
            SubGoalArg::Class(c) => c.name().to_string(),
            SubGoalArg::Location(l) => l.0.clone(),
        }
    }
}

/// A high-level action `(verb, argument)`; the planner's output unit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubGoal {
    pub verb: Verb,
    pub arg: SubGoalArg,
}

impl SubGoal {
    pub fn class(verb: Verb, class: ObjectClass) -> Self {
        SubGoal { verb, arg: SubGoalArg::Class(class) }
    }

    pub fn location(loc: LocationId) -> Self {
        SubGoal { verb: Verb::GotoLocation, arg: SubGoalArg::Location(loc) }
    }

    /// Canonical `(Verb, Arg)` rendering, e.g. `(PickupObject, Pan)`.
    pub fn render(&self) -> String {
        format!("({}, {})", self.verb, self.arg.text())
    }
}

impl PartialOrd for SubGoal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SubGoal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.verb
            .name()
            .cmp(other.verb.name())
            .then_with(|| self.arg.text().cmp(&other.arg.text()))
    }
}

impl fmt::Display for SubGoal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The seven task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TaskType {
    Examine,
    Pick,
    Clean,
    Stack,
    PickTwo,
    Heat,
    Cool,
}

impl TaskType {
    pub const ALL: &'static [TaskType] = &[
        TaskType::Examine,
        TaskType::Pick,
        TaskType::Clean,
        TaskType::Stack,
        TaskType::PickTwo,
        TaskType::Heat,
        TaskType::Cool,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskType::Examine => "Examine",
            TaskType::Pick => "Pick",
            TaskType::Clean => "Clean",
            TaskType::Stack => "Stack",
            TaskType::PickTwo => "PickTwo",
            TaskType::Heat => "Heat",
            TaskType::Cool => "Cool",
        }
    }

    pub fn from_name(name: &str) -> Option<TaskType> {
        TaskType::ALL.iter().copied().find(|t| t.name() == name)
    }

    /// Stable index used for seed derivation.
    pub fn index(self) -> u64 {
        TaskType::ALL.iter().position(|t| *t == self).unwrap() as u64
    }
}

impl fmt::Display for TaskType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Goal-side object condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectStateGoal {
    None,
    Cleaned,
    Heated,
    Cooled,
}

impl ObjectStateGoal {
    pub fn for_task(task: TaskType) -> Self {
        match task {
            TaskType::Clean => ObjectStateGoal::Cleaned,
            TaskType::Heat => ObjectStateGoal::Heated,
            TaskType::Cool => ObjectStateGoal::Cooled,
            _ => ObjectStateGoal::None,
        }
    }
}

/// The seven latent task arguments; doubles as the task goal `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PddlArgs {
    pub task_type: TaskType,
    pub object_target: ObjectClass,
    pub parent_target: ObjectClass,
    pub mrecep_target: Option<ObjectClass>,
    pub toggle_target: Option<ObjectClass>,
    pub object_state: ObjectStateGoal,
    pub object_sliced: bool,
    pub two_object: bool,
}

impl PddlArgs {
    /// Check the structural invariants that tie the fields together.
    pub fn validate(&self) -> Result<(), String> {
        if self.two_object != (self.task_type == TaskType::PickTwo) {
            return Err("two_object must hold exactly for PickTwo tasks".into());
        }
        if self.object_state != ObjectStateGoal::for_task(self.task_type) {
            return Err("object_state does not match task_type".into());
        }
        if self.mrecep_target.is_some() != (self.task_type == TaskType::Stack) {
            return Err("mrecep_target must be present exactly for Stack tasks".into());
        }
        if !self.parent_target.kind().receptacle {
            return Err("parent_target must be a receptacle class".into());
        }
        Ok(())
    }

    /// Force the dependent fields into agreement with `task_type`. Used to
    /// repair raw oracle output into a syntactically valid argument set.
    pub fn normalized(mut self) -> Self {
        self.two_object = self.task_type == TaskType::PickTwo;
        self.object_state = ObjectStateGoal::for_task(self.task_type);
        if self.task_type != TaskType::Stack {
            self.mrecep_target = None;
        } else if self.mrecep_target.is_none() {
            self.mrecep_target = Some(ObjectClass::Plate);
        }
        if self.task_type == TaskType::Examine {
            self.toggle_target = Some(ObjectClass::DeskLamp);
        } else {
            self.toggle_target = None;
        }
        self
    }
}

/// A concrete task: latent arguments plus the (possibly vague) instruction
/// text and the seed that reproduces the scene.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub pddl: PddlArgs,
    pub instruction: String,
    pub scene_seed: u64,
}

impl TaskSpec {
    /// Stable identifier, also used as the sample-pool `source_task_id`.
    pub fn task_id(&self) -> String {
        format!("{}-{}", self.pddl.task_type, self.scene_seed)
    }
}

/// Partial view `y`: accumulated visible classes, last action status, step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub visible_classes: Vec<ObjectClass>,
    pub last_status: Status,
    pub step: u64,
}

impl Observation {
    pub fn initial() -> Self {
        Observation { visible_classes: Vec::new(), last_status: Status::Ok, step: 0 }
    }
}

/// Episode outcome: success flag plus the goal-condition ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub success: bool,
    pub gc: f64,
    pub satisfied: Vec<String>,
    pub total: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgoal_ordering_is_lexicographic() {
        let a = SubGoal::class(Verb::PickupObject, ObjectClass::Apple);
        let b = SubGoal::class(Verb::PickupObject, ObjectClass::Pan);
        let c = SubGoal::class(Verb::PutObject, ObjectClass::Apple);
        assert!(a < b);
        assert!(b < c);
        let off = SubGoal::class(Verb::ToggleObjectOff, ObjectClass::Faucet);
        let on = SubGoal::class(Verb::ToggleObjectOn, ObjectClass::Faucet);
        assert!(off < on);
    }

    #[test]
    fn pddl_validation_catches_mismatches() {
        let good = PddlArgs {
            task_type: TaskType::Heat,
            object_target: ObjectClass::Apple,
            parent_target: ObjectClass::Fridge,
            mrecep_target: None,
            toggle_target: None,
            object_state: ObjectStateGoal::Heated,
            object_sliced: false,
            two_object: false,
        };
        assert!(good.validate().is_ok());

        let mut bad = good.clone();
        bad.object_state = ObjectStateGoal::None;
        assert!(bad.validate().is_err());

        let mut bad = good.clone();
        bad.two_object = true;
        assert!(bad.validate().is_err());

        let mut bad = good;
        bad.mrecep_target = Some(ObjectClass::Plate);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn status_rendering() {
        assert_eq!(Status::Ok.to_string(), "ok");
        assert_eq!(
            Status::Failed(FailReason::OccupiedHands).to_string(),
            "failed(occupied_hands)"
        );
    }

    #[test]
    fn subgoal_render() {
        let g = SubGoal::class(Verb::PickupObject, ObjectClass::Pan);
        assert_eq!(g.render(), "(PickupObject, Pan)");
        let g = SubGoal::location(LocationId::new(3));
        assert_eq!(g.render(), "(GotoLocation, loc-3)");
    }
}
