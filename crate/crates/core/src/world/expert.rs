//! Scripted expert: plans a goal-achieving sub-goal sequence from any
//! reachable state.
//!
//! The same machinery serves three roles: ground-truth rollouts for fresh
//! scenes, corrective completions for hindsight relabeling (plan from the
//! state a suboptimal trajectory ended in), and the value tail of the
//! true-value critic. Planning works by simulating candidate actions on a
//! scratch copy of the state, so every returned sequence replays cleanly.

use super::goal::evaluate_pddl;
use super::state::*;
use super::transition::apply_subgoal;
use super::vocab::ObjectClass;

/// Plan a sub-goal sequence that completes `goal` from `state`.
///
/// Returns `None` when the goal is not achievable as described, e.g. the
/// goal names a class with no instance in the scene. That happens routinely
/// when the goal comes from an adaptation module that has not seen the
/// right objects yet.
pub fn expert_completion(state: &LatentState, goal: &PddlArgs) -> Option<Vec<SubGoal>> {
    let mut recipe = Recipe { sim: state.clone(), plan: Vec::new() };
    recipe.solve(goal)?;
    if evaluate_pddl(goal, &recipe.sim).success {
        Some(recipe.plan)
    } else {
        None
    }
}

/// Ground-truth rollout for a generated scenario. Scenes from the task
/// generator are always solvable; a hand-built unsolvable scene yields an
/// empty rollout.
pub fn expert_rollout(spec: &TaskSpec, state: &LatentState) -> Vec<SubGoal> {
    expert_completion(state, &spec.pddl).unwrap_or_default()
}

struct Recipe {
    sim: LatentState,
    plan: Vec<SubGoal>,
}

impl Recipe {
    /// Apply one sub-goal to the scratch state; only successful actions are
    /// recorded, and a failure aborts the whole plan.
    fn step(&mut self, goal: SubGoal) -> Option<()> {
        let (next, status) = apply_subgoal(&self.sim, &goal);
        if !status.is_ok() {
            return None;
        }
        self.sim = next;
        self.plan.push(goal);
        Some(())
    }

    fn solve(&mut self, goal: &PddlArgs) -> Option<()> {
        if goal.object_sliced && !self.sim.objects.values().any(|o| o.class == goal.object_target && o.sliced) {
            self.slice_target(goal.object_target)?;
        }
        match goal.task_type {
            TaskType::Pick => {
                if !satisfied(&self.sim, goal) {
                    self.acquire(goal.object_target, &not_in_parent(goal.parent_target))?;
                    self.place(goal.parent_target)?;
                }
            }
            TaskType::PickTwo => {
                for _ in 0..2 {
                    if count_in_parent(&self.sim, goal.object_target, goal.parent_target) >= 2 {
                        break;
                    }
                    self.acquire(goal.object_target, &not_in_parent(goal.parent_target))?;
                    self.place(goal.parent_target)?;
                }
            }
            TaskType::Examine => {
                let lamp = goal.toggle_target.unwrap_or(ObjectClass::DeskLamp);
                if self.sim.held_class() != Some(goal.object_target) {
                    self.acquire(goal.object_target, &|_, _| true)?;
                }
                if !self.sim.objects.iter().any(|(id, o)| o.class == lamp && self.sim.is_on(id)) {
                    self.goto_instance_of(lamp)?;
                    self.step(SubGoal::class(Verb::ToggleObjectOn, lamp))?;
                }
            }
            TaskType::Stack => {
                let mrecep = goal.mrecep_target?;
                let loaded = |sim: &LatentState, id: &ObjectId| -> bool {
                    matches!(&sim.objects[id].location, ObjectLocation::In(p)
                        if sim.objects.get(p).map(|o| o.class) == Some(mrecep))
                };
                if !self.sim.instances_of(goal.object_target).iter().any(|id| loaded(&self.sim, id)) {
                    self.acquire(goal.object_target, &|_, _| true)?;
                    self.goto_instance_of(mrecep)?;
                    self.step(SubGoal::class(Verb::PutObject, mrecep))?;
                }
                if count_in_parent(&self.sim, mrecep, goal.parent_target) == 0 {
                    // Carry the loaded movable receptacle to the parent.
                    let prefer_loaded = |sim: &LatentState, id: &ObjectId| -> bool {
                        sim.contents(id)
                            .iter()
                            .any(|c| sim.objects[c].class == goal.object_target)
                    };
                    self.acquire(mrecep, &prefer_loaded)?;
                    self.place(goal.parent_target)?;
                }
            }
            TaskType::Clean => {
                let has_clean = |sim: &LatentState| {
                    sim.objects.values().any(|o| o.class == goal.object_target && o.clean)
                };
                if !has_clean(&self.sim) {
                    self.acquire(goal.object_target, &|_, _| true)?;
                    self.goto_instance_of(ObjectClass::Sink)?;
                    self.step(SubGoal::class(Verb::PutObject, ObjectClass::Sink))?;
                    self.step(SubGoal::class(Verb::ToggleObjectOn, ObjectClass::Faucet))?;
                    self.step(SubGoal::class(Verb::ToggleObjectOff, ObjectClass::Faucet))?;
                }
                self.turn_off_running_faucets()?;
                let prefer_clean =
                    |sim: &LatentState, id: &ObjectId| -> bool { sim.objects[id].clean };
                self.acquire_preferring(goal.object_target, &not_in_parent(goal.parent_target), &prefer_clean)?;
                self.place(goal.parent_target)?;
            }
            TaskType::Heat => {
                let has_hot = |sim: &LatentState| {
                    sim.objects.values().any(|o| o.class == goal.object_target && o.temp == Temp::Hot)
                };
                if !has_hot(&self.sim) {
                    self.acquire(goal.object_target, &|_, _| true)?;
                    self.goto_instance_of(ObjectClass::Microwave)?;
                    self.ensure_appliance_open(ObjectClass::Microwave)?;
                    self.step(SubGoal::class(Verb::PutObject, ObjectClass::Microwave))?;
                    self.step(SubGoal::class(Verb::CloseObject, ObjectClass::Microwave))?;
                    self.step(SubGoal::class(Verb::ToggleObjectOn, ObjectClass::Microwave))?;
                    self.step(SubGoal::class(Verb::ToggleObjectOff, ObjectClass::Microwave))?;
                }
                let prefer_hot =
                    |sim: &LatentState, id: &ObjectId| -> bool { sim.objects[id].temp == Temp::Hot };
                self.acquire_preferring(goal.object_target, &not_in_parent(goal.parent_target), &prefer_hot)?;
                self.place(goal.parent_target)?;
            }
            TaskType::Cool => {
                let has_cold = |sim: &LatentState| {
                    sim.objects.values().any(|o| o.class == goal.object_target && o.temp == Temp::Cold)
                };
                if !has_cold(&self.sim) {
                    self.acquire(goal.object_target, &|_, _| true)?;
                    self.goto_instance_of(ObjectClass::Fridge)?;
                    self.ensure_appliance_open(ObjectClass::Fridge)?;
                    self.step(SubGoal::class(Verb::PutObject, ObjectClass::Fridge))?;
                    self.step(SubGoal::class(Verb::CloseObject, ObjectClass::Fridge))?;
                    // Re-opening after a full closed step is what chills the
                    // contents.
                    self.step(SubGoal::class(Verb::OpenObject, ObjectClass::Fridge))?;
                }
                let prefer_cold =
                    |sim: &LatentState, id: &ObjectId| -> bool { sim.objects[id].temp == Temp::Cold };
                self.acquire_preferring(goal.object_target, &not_in_parent(goal.parent_target), &prefer_cold)?;
                self.place(goal.parent_target)?;
            }
        }
        Some(())
    }

    fn slice_target(&mut self, target: ObjectClass) -> Option<()> {
        self.acquire(ObjectClass::Knife, &|_, _| true)?;
        let instance = pick_instance(&self.sim, target, &|_, _| true, &|_, _| false)?;
        self.goto_object(&instance)?;
        self.open_chain_to(&instance)?;
        self.step(SubGoal::class(Verb::SliceObject, target))
    }

    /// Emit a goto so the agent stands at `dest`. A class-argument goto is
    /// preferred when the simulator would resolve it to the same place,
    /// otherwise the raw location is used.
    fn goto(&mut self, dest: &LocationId, hint: Option<ObjectClass>) -> Option<()> {
        if &self.sim.agent_location == dest {
            return Some(());
        }
        if let Some(class) = hint {
            let resolves_to = self
                .sim
                .instances_of(class)
                .first()
                .and_then(|id| self.sim.root_location(id));
            if resolves_to.as_ref() == Some(dest) {
                return self.step(SubGoal::class(Verb::GotoLocation, class));
            }
        }
        self.step(SubGoal::location(dest.clone()))
    }

    fn goto_instance_of(&mut self, class: ObjectClass) -> Option<()> {
        let id = self.sim.instances_of(class).into_iter().next()?;
        self.goto_object_with_hint(&id, class)
    }

    fn goto_object(&mut self, id: &ObjectId) -> Option<()> {
        let class = self.sim.objects.get(id)?.class;
        self.goto_object_with_hint(id, class)
    }

    fn goto_object_with_hint(&mut self, id: &ObjectId, class: ObjectClass) -> Option<()> {
        let dest = match self.sim.root_location(id) {
            Some(l) => l,
            None => return Some(()), // held: already wherever the agent is
        };
        self.goto(&dest, Some(class))
    }

    /// Open every closed container between the agent and `id`, shallowest
    /// first, toggling running appliances off when the interlock demands it.
    fn open_chain_to(&mut self, id: &ObjectId) -> Option<()> {
        let mut chain: Vec<ObjectId> = Vec::new();
        let mut cur = id.clone();
        while let ObjectLocation::In(parent) = &self.sim.objects.get(&cur)?.location {
            chain.push(parent.clone());
            cur = parent.clone();
        }
        for container in chain.into_iter().rev() {
            if !self.sim.is_open(&container) {
                let class = self.sim.objects[&container].class;
                if self.sim.is_on(&container) {
                    self.step(SubGoal::class(Verb::ToggleObjectOff, class))?;
                }
                self.step(SubGoal::class(Verb::OpenObject, class))?;
            }
        }
        Some(())
    }

    fn ensure_appliance_open(&mut self, class: ObjectClass) -> Option<()> {
        let id = self.sim.instances_of(class).into_iter().next()?;
        if !self.sim.is_open(&id) {
            if self.sim.is_on(&id) {
                self.step(SubGoal::class(Verb::ToggleObjectOff, class))?;
            }
            self.step(SubGoal::class(Verb::OpenObject, class))?;
        }
        Some(())
    }

    /// Put whatever is being held into some receptacle, opening one if the
    /// current location only offers closed containers.
    fn stash_held(&mut self) -> Option<()> {
        if self.sim.inventory.is_none() {
            return Some(());
        }
        let here = self.sim.agent_location.clone();
        let mut candidates: Vec<(u8, ObjectId)> = self
            .sim
            .objects
            .iter()
            .filter(|(_, o)| o.class.kind().receptacle && !o.class.kind().pickupable)
            .filter(|(id, _)| self.sim.root_location(id).as_ref() == Some(&here))
            .map(|(id, o)| ((o.class.kind().openable as u8), id.clone()))
            .collect();
        candidates.sort();
        let (_, recep) = match candidates.into_iter().next() {
            Some(c) => c,
            None => {
                // No furniture here at all; walk to the first fixed
                // receptacle in the scene.
                let target = self
                    .sim
                    .objects
                    .iter()
                    .find(|(_, o)| o.class.kind().receptacle && !o.class.kind().pickupable)
                    .map(|(id, _)| id.clone())?;
                self.goto_object(&target)?;
                (0, target)
            }
        };
        let class = self.sim.objects[&recep].class;
        if !self.sim.is_open(&recep) {
            if self.sim.is_on(&recep) {
                self.step(SubGoal::class(Verb::ToggleObjectOff, class))?;
            }
            self.step(SubGoal::class(Verb::OpenObject, class))?;
        }
        self.step(SubGoal::class(Verb::PutObject, class))
    }

    fn acquire(
        &mut self,
        class: ObjectClass,
        eligible: &dyn Fn(&LatentState, &ObjectId) -> bool,
    ) -> Option<()> {
        self.acquire_preferring(class, eligible, &|_, _| false)
    }

    /// Get an instance of `class` into the inventory. `eligible` filters
    /// candidates, `preferred` ranks the keepers (preferred first).
    fn acquire_preferring(
        &mut self,
        class: ObjectClass,
        eligible: &dyn Fn(&LatentState, &ObjectId) -> bool,
        preferred: &dyn Fn(&LatentState, &ObjectId) -> bool,
    ) -> Option<()> {
        if let Some(held) = &self.sim.inventory {
            if self.sim.objects[held].class == class && eligible(&self.sim, held) {
                return Some(());
            }
            self.stash_held()?;
        }
        let instance = pick_instance(&self.sim, class, eligible, preferred)?;
        self.goto_object(&instance)?;
        self.open_chain_to(&instance)?;
        self.step(SubGoal::class(Verb::PickupObject, class))?;
        Some(())
    }

    /// Carry the held object to an instance of `parent` and put it inside.
    fn place(&mut self, parent: ObjectClass) -> Option<()> {
        self.goto_instance_of(parent)?;
        let id = self
            .sim
            .instances_of(parent)
            .into_iter()
            .find(|id| self.sim.root_location(id).as_ref() == Some(&self.sim.agent_location))?;
        if !self.sim.is_open(&id) {
            if self.sim.is_on(&id) {
                self.step(SubGoal::class(Verb::ToggleObjectOff, parent))?;
            }
            self.step(SubGoal::class(Verb::OpenObject, parent))?;
        }
        self.step(SubGoal::class(Verb::PutObject, parent))
    }

    fn turn_off_running_faucets(&mut self) -> Option<()> {
        let running: Vec<ObjectId> = self
            .sim
            .objects
            .iter()
            .filter(|(id, o)| o.class == ObjectClass::Faucet && self.sim.is_on(id))
            .map(|(id, _)| id.clone())
            .collect();
        for faucet in running {
            self.goto_object(&faucet)?;
            self.step(SubGoal::class(Verb::ToggleObjectOff, ObjectClass::Faucet))?;
        }
        Some(())
    }
}

fn not_in_parent(parent: ObjectClass) -> impl Fn(&LatentState, &ObjectId) -> bool {
    move |sim, id| {
        !matches!(&sim.objects[id].location, ObjectLocation::In(p)
            if sim.objects.get(p).map(|o| o.class) == Some(parent))
    }
}

fn count_in_parent(sim: &LatentState, object: ObjectClass, parent: ObjectClass) -> usize {
    sim.objects
        .values()
        .filter(|o| o.class == object)
        .filter(|o| {
            matches!(&o.location, ObjectLocation::In(p)
                if sim.objects.get(p).map(|po| po.class) == Some(parent))
        })
        .count()
}

fn satisfied(sim: &LatentState, goal: &PddlArgs) -> bool {
    evaluate_pddl(goal, sim).success
}

/// Choose the instance to work on: preferred ones first, then shallower
/// containment, then id order. Mirrors the simulator's own pickup
/// preference closely enough that planned actions grab the intended thing.
fn pick_instance(
    sim: &LatentState,
    class: ObjectClass,
    eligible: &dyn Fn(&LatentState, &ObjectId) -> bool,
    preferred: &dyn Fn(&LatentState, &ObjectId) -> bool,
) -> Option<ObjectId> {
    let mut candidates: Vec<(u8, u8, ObjectId)> = sim
        .objects
        .iter()
        .filter(|(_, o)| o.class == class)
        .filter(|(id, _)| !matches!(sim.objects[*id].location, ObjectLocation::Inventory))
        .filter(|(id, _)| eligible(sim, id))
        .map(|(id, o)| {
            let pref = !preferred(sim, id) as u8;
            let depth = match o.location {
                ObjectLocation::At(_) => 0u8,
                _ => 1,
            };
            (pref, depth, id.clone())
        })
        .collect();
    candidates.sort();
    candidates.into_iter().map(|(_, _, id)| id).next()
}
