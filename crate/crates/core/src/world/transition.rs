//! Deterministic sub-goal transition function and the emission function.
//!
//! `apply_subgoal` is total: illegal inputs come back as a named failure
//! status, never an error or panic, and a failed action leaves the state
//! unchanged apart from the clock and time-driven temperature effects.

use super::state::*;
use super::vocab::ObjectClass;
use std::collections::BTreeSet;

/// Apply one sub-goal to a state and return the successor plus a status.
///
/// Effect order per step: fridge chilling (time-driven, evaluated on the
/// pre-state so an object must sit in a closed fridge across a step boundary
/// before it turns cold), then the action itself, then instantaneous washing
/// and heating rules.
pub fn apply_subgoal(state: &LatentState, goal: &SubGoal) -> (LatentState, Status) {
    let mut next = state.clone();
    next.clock += 1;

    apply_fridge_chill(&mut next);
    let status = apply_action(&mut next, goal);
    apply_sink_wash(&mut next);
    apply_microwave_heat(&mut next);

    (next, status)
}

/// Objects that have been inside a closed fridge since before this step
/// turn cold.
fn apply_fridge_chill(state: &mut LatentState) {
    let chilled: Vec<ObjectId> = state
        .objects
        .iter()
        .filter_map(|(id, obj)| match &obj.location {
            ObjectLocation::In(parent) => {
                let parent_obj = state.objects.get(parent)?;
                if parent_obj.class == ObjectClass::Fridge && !state.is_open(parent) {
                    Some(id.clone())
                } else {
                    None
                }
            }
            _ => None,
        })
        .collect();
    for id in chilled {
        if let Some(obj) = state.objects.get_mut(&id) {
            obj.temp = Temp::Cold;
        }
    }
}

/// Objects inside a sink whose co-located faucet is running become clean.
fn apply_sink_wash(state: &mut LatentState) {
    let running_faucet_locs: BTreeSet<LocationId> = state
        .objects
        .iter()
        .filter(|(id, o)| o.class == ObjectClass::Faucet && state.is_on(id))
        .filter_map(|(id, _)| state.root_location(id))
        .collect();
    let washed: Vec<ObjectId> = state
        .objects
        .iter()
        .filter_map(|(id, obj)| match &obj.location {
            ObjectLocation::In(parent) => {
                let parent_obj = state.objects.get(parent)?;
                let loc = state.root_location(parent)?;
                if parent_obj.class == ObjectClass::Sink && running_faucet_locs.contains(&loc) {
                    Some(id.clone())
                } else {
                    None
                }
            }
            _ => None,
        })
        .collect();
    for id in washed {
        if let Some(obj) = state.objects.get_mut(&id) {
            obj.clean = true;
        }
    }
}

/// Objects inside a running microwave become hot.
fn apply_microwave_heat(state: &mut LatentState) {
    let heated: Vec<ObjectId> = state
        .objects
        .iter()
        .filter_map(|(id, obj)| match &obj.location {
            ObjectLocation::In(parent) => {
                let parent_obj = state.objects.get(parent)?;
                if parent_obj.class == ObjectClass::Microwave && state.is_on(parent) {
                    Some(id.clone())
                } else {
                    None
                }
            }
            _ => None,
        })
        .collect();
    for id in heated {
        if let Some(obj) = state.objects.get_mut(&id) {
            obj.temp = Temp::Hot;
        }
    }
}

fn apply_action(state: &mut LatentState, goal: &SubGoal) -> Status {
    match goal.verb {
        Verb::GotoLocation => apply_goto(state, &goal.arg),
        Verb::PickupObject => match &goal.arg {
            SubGoalArg::Class(c) => apply_pickup(state, *c),
            SubGoalArg::Location(_) => Status::Failed(FailReason::Incompatible),
        },
        Verb::PutObject => match &goal.arg {
            SubGoalArg::Class(c) => apply_put(state, *c),
            SubGoalArg::Location(_) => Status::Failed(FailReason::Incompatible),
        },
        Verb::OpenObject => match &goal.arg {
            SubGoalArg::Class(c) => apply_open(state, *c, true),
            SubGoalArg::Location(_) => Status::Failed(FailReason::Incompatible),
        },
        Verb::CloseObject => match &goal.arg {
            SubGoalArg::Class(c) => apply_open(state, *c, false),
            SubGoalArg::Location(_) => Status::Failed(FailReason::Incompatible),
        },
        Verb::ToggleObjectOn => match &goal.arg {
            SubGoalArg::Class(c) => apply_toggle(state, *c, true),
            SubGoalArg::Location(_) => Status::Failed(FailReason::Incompatible),
        },
        Verb::ToggleObjectOff => match &goal.arg {
            SubGoalArg::Class(c) => apply_toggle(state, *c, false),
            SubGoalArg::Location(_) => Status::Failed(FailReason::Incompatible),
        },
        Verb::SliceObject => match &goal.arg {
            SubGoalArg::Class(c) => apply_slice(state, *c),
            SubGoalArg::Location(_) => Status::Failed(FailReason::Incompatible),
        },
    }
}

fn apply_goto(state: &mut LatentState, arg: &SubGoalArg) -> Status {
    let dest = match arg {
        SubGoalArg::Location(l) => {
            if !state.locations().contains(l) {
                return Status::Failed(FailReason::NotVisible);
            }
            l.clone()
        }
        SubGoalArg::Class(c) => {
            // Navigate to the first instance of the class; a held instance
            // resolves to where the agent already stands.
            let Some(first) = state.instances_of(*c).into_iter().next() else {
                return Status::Failed(FailReason::NotVisible);
            };
            state
                .root_location(&first)
                .unwrap_or_else(|| state.agent_location.clone())
        }
    };
    state.agent_location = dest;
    Status::Ok
}

/// Reachable co-located instances of a class, bare-before-contained then by
/// id. The depth ordering keeps the simulator from grabbing something out of
/// a container when the same class also sits in the open.
fn reachable_instances(state: &LatentState, class: ObjectClass) -> Vec<ObjectId> {
    let mut found: Vec<(usize, ObjectId)> = state
        .objects
        .iter()
        .filter(|(_, o)| o.class == class)
        .filter(|(id, _)| {
            state.root_location(id).as_ref() == Some(&state.agent_location)
                && state.chain_open(id)
        })
        .map(|(id, o)| {
            let depth = match o.location {
                ObjectLocation::At(_) => 0,
                _ => 1,
            };
            (depth, id.clone())
        })
        .collect();
    found.sort();
    found.into_iter().map(|(_, id)| id).collect()
}

fn apply_pickup(state: &mut LatentState, class: ObjectClass) -> Status {
    if !class.kind().pickupable {
        return Status::Failed(FailReason::Incompatible);
    }
    if state.inventory.is_some() {
        return Status::Failed(FailReason::OccupiedHands);
    }
    if let Some(id) = reachable_instances(state, class).into_iter().next() {
        state.objects.get_mut(&id).unwrap().location = ObjectLocation::Inventory;
        state.inventory = Some(id);
        return Status::Ok;
    }
    // Present at this location but sealed away, or absent entirely.
    let co_located = state.objects.iter().any(|(id, o)| {
        o.class == class && state.root_location(id).as_ref() == Some(&state.agent_location)
    });
    if co_located {
        Status::Failed(FailReason::ClosedContainer)
    } else {
        Status::Failed(FailReason::NotVisible)
    }
}

fn apply_put(state: &mut LatentState, class: ObjectClass) -> Status {
    if !class.kind().receptacle {
        return Status::Failed(FailReason::Incompatible);
    }
    let Some(held) = state.inventory.clone() else {
        return Status::Failed(FailReason::EmptyHands);
    };
    // The held instance roots at the inventory, so it can never be chosen
    // as its own destination.
    let candidates: Vec<ObjectId> = state
        .objects
        .iter()
        .filter(|(_, o)| o.class == class)
        .filter(|(id, _)| state.root_location(id).as_ref() == Some(&state.agent_location))
        .map(|(id, _)| id.clone())
        .collect();
    if candidates.is_empty() {
        return Status::Failed(FailReason::NotVisible);
    }
    match candidates.iter().find(|id| state.is_open(id) && state.chain_open(id)) {
        Some(recep) => {
            let recep = recep.clone();
            state.objects.get_mut(&held).unwrap().location = ObjectLocation::In(recep);
            state.inventory = None;
            Status::Ok
        }
        None => Status::Failed(FailReason::ClosedContainer),
    }
}

fn co_located_instance(state: &LatentState, class: ObjectClass) -> Option<ObjectId> {
    state
        .objects
        .iter()
        .filter(|(_, o)| o.class == class)
        .find(|(id, _)| state.root_location(id).as_ref() == Some(&state.agent_location))
        .map(|(id, _)| id.clone())
}

fn apply_open(state: &mut LatentState, class: ObjectClass, open: bool) -> Status {
    if !class.kind().openable {
        return Status::Failed(FailReason::Incompatible);
    }
    let Some(id) = co_located_instance(state, class) else {
        return Status::Failed(FailReason::NotVisible);
    };
    // Appliance interlock: a running microwave stays shut until toggled off.
    if open && state.is_on(&id) {
        return Status::Failed(FailReason::Incompatible);
    }
    let recep = state.receptacles.get_mut(&id).expect("openable instance has receptacle state");
    if recep.is_open == open {
        return Status::Failed(FailReason::Incompatible);
    }
    recep.is_open = open;
    Status::Ok
}

fn apply_toggle(state: &mut LatentState, class: ObjectClass, on: bool) -> Status {
    if !class.kind().toggleable {
        return Status::Failed(FailReason::Incompatible);
    }
    let Some(id) = co_located_instance(state, class) else {
        return Status::Failed(FailReason::NotVisible);
    };
    // Appliance interlock: an open microwave will not start.
    if on && class.kind().openable && state.is_open(&id) {
        return Status::Failed(FailReason::Incompatible);
    }
    let toggle = state.toggles.get_mut(&id).expect("toggleable instance has toggle state");
    if toggle.is_on == on {
        return Status::Failed(FailReason::Incompatible);
    }
    toggle.is_on = on;
    Status::Ok
}

fn apply_slice(state: &mut LatentState, class: ObjectClass) -> Status {
    if !class.kind().pickupable {
        return Status::Failed(FailReason::Incompatible);
    }
    if state.held_class() != Some(ObjectClass::Knife) {
        return Status::Failed(FailReason::Incompatible);
    }
    match reachable_instances(state, class).into_iter().find(|id| {
        !state.objects.get(id).map(|o| o.sliced).unwrap_or(true)
    }) {
        Some(id) => {
            state.objects.get_mut(&id).unwrap().sliced = true;
            Status::Ok
        }
        None => {
            let co_located = state.objects.iter().any(|(id, o)| {
                o.class == class
                    && state.root_location(id).as_ref() == Some(&state.agent_location)
            });
            if co_located {
                Status::Failed(FailReason::ClosedContainer)
            } else {
                Status::Failed(FailReason::NotVisible)
            }
        }
    }
}

/// Emission function: the instantaneous view given the set of visited
/// locations. Contents of closed receptacles stay hidden; the inventory is
/// always visible. Episode-level accumulation (objects once seen stay
/// listed) happens in the episode state, not here.
pub fn observe(state: &LatentState, visited: &BTreeSet<LocationId>) -> Vec<ObjectClass> {
    let mut seen: BTreeSet<ObjectClass> = BTreeSet::new();
    for (id, obj) in &state.objects {
        if object_visible(state, id, visited) {
            seen.insert(obj.class);
        }
    }
    seen.into_iter().collect()
}

fn object_visible(state: &LatentState, id: &ObjectId, visited: &BTreeSet<LocationId>) -> bool {
    match &state.objects[id].location {
        ObjectLocation::Inventory => true,
        ObjectLocation::At(l) => visited.contains(l),
        ObjectLocation::In(parent) => {
            state.is_open(parent) && object_visible(state, parent, visited)
        }
    }
}

/// The canonical legal action space: every kind-compatible (verb, class)
/// pair over the full vocabulary plus a goto per scene location. Absent
/// classes simply fail with `not_visible` at execution time.
pub fn legal_subgoals(locations: &[LocationId]) -> Vec<SubGoal> {
    let mut out = Vec::new();
    for &verb in Verb::ALL {
        for &class in ObjectClass::ALL {
            if verb.accepts(class) {
                out.push(SubGoal::class(verb, class));
            }
        }
    }
    for loc in locations {
        out.push(SubGoal::location(loc.clone()));
    }
    out.sort();
    out
}
