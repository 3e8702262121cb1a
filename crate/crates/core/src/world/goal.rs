//! Goal predicate decomposition and episode scoring.
//!
//! Each task's conjunctive goal is split into atomic predicates so partial
//! progress scores as a goal-condition ratio. Success holds exactly when
//! every predicate is satisfied, which keeps `gc = 1 <=> success` by
//! construction.

use super::state::*;
use super::vocab::ObjectClass;

/// An atomic goal condition checkable against a latent state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GoalPredicate {
    /// Some instance of `object` sits (directly) inside an instance of `parent`.
    InReceptacle { object: ObjectClass, parent: ObjectClass },
    /// Some instance of `object` with the required state sits inside an
    /// instance of `parent`. For cleaned objects this also requires every
    /// faucet in the scene to be off again.
    StateInReceptacle { object: ObjectClass, parent: ObjectClass, state: ObjectStateGoal },
    /// At least two distinct instances of `object` inside `parent` instances.
    TwoInReceptacle { object: ObjectClass, parent: ObjectClass },
    /// Some instance of `object` sits on/in an instance of the movable
    /// receptacle `mrecep`.
    OnMovable { object: ObjectClass, mrecep: ObjectClass },
    /// Some instance of `mrecep` sits inside an instance of `parent`.
    MovableInParent { mrecep: ObjectClass, parent: ObjectClass },
    /// The agent holds an instance of `object`.
    Holding { object: ObjectClass },
    /// Some instance of `class` is toggled on.
    ToggledOn { class: ObjectClass },
    /// Some instance of `object` is sliced.
    Sliced { object: ObjectClass },
}

impl GoalPredicate {
    pub fn label(&self) -> String {
        match self {
            GoalPredicate::InReceptacle { object, parent } => {
                format!("a {object} is in the {parent}")
            }
            GoalPredicate::StateInReceptacle { object, parent, state } => {
                let adjective = match state {
                    ObjectStateGoal::Cleaned => "clean",
                    ObjectStateGoal::Heated => "hot",
                    ObjectStateGoal::Cooled => "cold",
                    ObjectStateGoal::None => "plain",
                };
                if *state == ObjectStateGoal::Cleaned {
                    format!("a {adjective} {object} is in the {parent} with the faucet off")
                } else {
                    format!("a {adjective} {object} is in the {parent}")
                }
            }
            GoalPredicate::TwoInReceptacle { object, parent } => {
                format!("two {object}s are in the {parent}")
            }
            GoalPredicate::OnMovable { object, mrecep } => {
                format!("a {object} is on the {mrecep}")
            }
            GoalPredicate::MovableInParent { mrecep, parent } => {
                format!("the {mrecep} is in the {parent}")
            }
            GoalPredicate::Holding { object } => format!("holding a {object}"),
            GoalPredicate::ToggledOn { class } => format!("the {class} is on"),
            GoalPredicate::Sliced { object } => format!("a {object} is sliced"),
        }
    }

    pub fn holds(&self, state: &LatentState) -> bool {
        match self {
            GoalPredicate::InReceptacle { object, parent } => {
                count_in_parent(state, *object, *parent, None) >= 1
            }
            GoalPredicate::StateInReceptacle { object, parent, state: goal_state } => {
                let matched = count_in_parent(state, *object, *parent, Some(*goal_state)) >= 1;
                if *goal_state == ObjectStateGoal::Cleaned {
                    matched && all_faucets_off(state)
                } else {
                    matched
                }
            }
            GoalPredicate::TwoInReceptacle { object, parent } => {
                count_in_parent(state, *object, *parent, None) >= 2
            }
            GoalPredicate::OnMovable { object, mrecep } => state.objects.iter().any(|(_, o)| {
                o.class == *object
                    && matches!(&o.location, ObjectLocation::In(p)
                        if state.objects.get(p).map(|po| po.class) == Some(*mrecep))
            }),
            GoalPredicate::MovableInParent { mrecep, parent } => {
                count_in_parent(state, *mrecep, *parent, None) >= 1
            }
            GoalPredicate::Holding { object } => state.held_class() == Some(*object),
            GoalPredicate::ToggledOn { class } => state
                .objects
                .iter()
                .any(|(id, o)| o.class == *class && state.is_on(id)),
            GoalPredicate::Sliced { object } => {
                state.objects.values().any(|o| o.class == *object && o.sliced)
            }
        }
    }
}

fn all_faucets_off(state: &LatentState) -> bool {
    !state
        .objects
        .iter()
        .any(|(id, o)| o.class == ObjectClass::Faucet && state.is_on(id))
}

fn state_matches(obj: &ObjectState, goal: Option<ObjectStateGoal>) -> bool {
    match goal {
        None | Some(ObjectStateGoal::None) => true,
        Some(ObjectStateGoal::Cleaned) => obj.clean,
        Some(ObjectStateGoal::Heated) => obj.temp == Temp::Hot,
        Some(ObjectStateGoal::Cooled) => obj.temp == Temp::Cold,
    }
}

fn count_in_parent(
    state: &LatentState,
    object: ObjectClass,
    parent: ObjectClass,
    goal_state: Option<ObjectStateGoal>,
) -> usize {
    state
        .objects
        .values()
        .filter(|o| o.class == object && state_matches(o, goal_state))
        .filter(|o| {
            matches!(&o.location, ObjectLocation::In(p)
                if state.objects.get(p).map(|po| po.class) == Some(parent))
        })
        .count()
}

/// Decompose a task goal into its atomic predicates.
pub fn goal_predicates(pddl: &PddlArgs) -> Vec<GoalPredicate> {
    let object = pddl.object_target;
    let parent = pddl.parent_target;
    let mut preds = match pddl.task_type {
        TaskType::Pick => vec![GoalPredicate::InReceptacle { object, parent }],
        TaskType::Heat => vec![
            GoalPredicate::InReceptacle { object, parent },
            GoalPredicate::StateInReceptacle { object, parent, state: ObjectStateGoal::Heated },
        ],
        TaskType::Cool => vec![
            GoalPredicate::InReceptacle { object, parent },
            GoalPredicate::StateInReceptacle { object, parent, state: ObjectStateGoal::Cooled },
        ],
        TaskType::Clean => vec![
            GoalPredicate::InReceptacle { object, parent },
            GoalPredicate::StateInReceptacle { object, parent, state: ObjectStateGoal::Cleaned },
        ],
        TaskType::PickTwo => vec![
            GoalPredicate::InReceptacle { object, parent },
            GoalPredicate::TwoInReceptacle { object, parent },
        ],
        TaskType::Stack => {
            let mrecep = pddl.mrecep_target.unwrap_or(ObjectClass::Plate);
            vec![
                GoalPredicate::OnMovable { object, mrecep },
                GoalPredicate::MovableInParent { mrecep, parent },
            ]
        }
        TaskType::Examine => vec![
            GoalPredicate::Holding { object },
            GoalPredicate::ToggledOn {
                class: pddl.toggle_target.unwrap_or(ObjectClass::DeskLamp),
            },
        ],
    };
    if pddl.object_sliced {
        preds.push(GoalPredicate::Sliced { object });
    }
    preds
}

/// Score a state against a task goal.
pub fn evaluate(spec: &TaskSpec, state: &LatentState) -> Outcome {
    evaluate_pddl(&spec.pddl, state)
}

/// Score a state against bare task arguments (used when the goal under
/// evaluation is a predicted one rather than the scenario's own).
pub fn evaluate_pddl(pddl: &PddlArgs, state: &LatentState) -> Outcome {
    let preds = goal_predicates(pddl);
    let total = preds.len();
    let satisfied: Vec<String> = preds
        .iter()
        .filter(|p| p.holds(state))
        .map(|p| p.label())
        .collect();
    let gc = satisfied.len() as f64 / total as f64;
    Outcome { success: satisfied.len() == total, gc, satisfied, total }
}
