//! Fixed object-class vocabulary.
//!
//! The vocabulary is closed at build time and totally ordered (lexicographic
//! by class name) so every tie-break in the simulator and planner is
//! deterministic. Kinds are a flag set because some classes are several
//! things at once (a Microwave is an openable receptacle and a toggleable
//! appliance; a Plate is pickupable and a movable receptacle).

use serde::{Deserialize, Serialize};
use std::fmt;

/// Everything an instance of a class can be. Flags, not an enum: classes
/// combine them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassKind {
    pub pickupable: bool,
    pub receptacle: bool,
    pub openable: bool,
    pub toggleable: bool,
}

macro_rules! vocabulary {
    ($( $name:ident => ($pick:expr, $recep:expr, $open:expr, $toggle:expr) ),+ $(,)?) => {
        /// One of the fixed household object classes.
        ///
        /// Variants are declared in lexicographic order so the derived `Ord`
        /// is the vocabulary's canonical order.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum ObjectClass {
            $( $name, )+
        }

        impl ObjectClass {
            pub const ALL: &'static [ObjectClass] = &[ $( ObjectClass::$name, )+ ];

            pub fn name(self) -> &'static str {
                match self {
                    $( ObjectClass::$name => stringify!($name), )+
                }
            }

            pub fn kind(self) -> ClassKind {
                match self {
                    $( ObjectClass::$name => ClassKind {
                        pickupable: $pick,
                        receptacle: $recep,
                        openable: $open,
                        toggleable: $toggle,
                    }, )+
                }
            }

            pub fn from_name(name: &str) -> Option<ObjectClass> {
                match name {
                    $( stringify!($name) => Some(ObjectClass::$name), )+
                    _ => None,
                }
            }
        }
    };
}

vocabulary! {
    //                 (pickupable, receptacle, openable, toggleable)
    Apple          => (true,  false, false, false),
    Basketball     => (true,  false, false, false),
    Book           => (true,  false, false, false),
    Bowl           => (true,  true,  false, false),
    Bread          => (true,  false, false, false),
    Cabinet        => (false, true,  true,  false),
    Candle         => (true,  false, false, false),
    CellPhone      => (true,  false, false, false),
    CoffeeMachine  => (false, true,  false, true),
    CounterTop     => (false, true,  false, false),
    Cup            => (true,  true,  false, false),
    DeskLamp       => (false, false, false, true),
    DiningTable    => (false, true,  false, false),
    Drawer         => (false, true,  true,  false),
    Egg            => (true,  false, false, false),
    Faucet         => (false, false, false, true),
    Fork           => (true,  false, false, false),
    Fridge         => (false, true,  true,  false),
    GarbageCan     => (false, true,  false, false),
    Knife          => (true,  false, false, false),
    Ladle          => (true,  false, false, false),
    Microwave      => (false, true,  true,  true),
    Mug            => (true,  true,  false, false),
    Pan            => (true,  true,  false, false),
    Plate          => (true,  true,  false, false),
    Potato         => (true,  false, false, false),
    Shelf          => (false, true,  false, false),
    SideTable      => (false, true,  false, false),
    Sink           => (false, true,  false, false),
    SoapBottle     => (true,  false, false, false),
    Spoon          => (true,  false, false, false),
    SprayBottle    => (true,  false, false, false),
    Tomato         => (true,  false, false, false),
    Vase           => (true,  false, false, false),
    Watch          => (true,  false, false, false),
}

impl ObjectClass {
    /// Receptacles an agent can carry around (pickupable receptacles).
    pub fn is_movable_receptacle(self) -> bool {
        let k = self.kind();
        k.pickupable && k.receptacle
    }

    /// "in" for containers, "on" for surfaces. Used by instruction templates.
    pub fn preposition(self) -> &'static str {
        match self {
            ObjectClass::Cabinet
            | ObjectClass::Drawer
            | ObjectClass::Fridge
            | ObjectClass::Microwave
            | ObjectClass::GarbageCan
            | ObjectClass::Sink
            | ObjectClass::Bowl
            | ObjectClass::Cup
            | ObjectClass::Mug
            | ObjectClass::Pan => "in",
            _ => "on",
        }
    }

    /// Lowercase spaced rendering for natural instructions: `SoapBottle`
    /// becomes "soap bottle", `Potato` becomes "potato".
    pub fn spoken_name(self) -> String {
        let mut out = String::new();
        for (i, ch) in self.name().chars().enumerate() {
            if ch.is_uppercase() && i > 0 {
                out.push(' ');
            }
            out.push(ch.to_ascii_lowercase());
        }
        out
    }

    /// Rendering used by renamed (disambiguated) task text: single-word
    /// classes are lowercased, camel-case classes keep their canonical name.
    pub fn renamed_text(self) -> String {
        let name = self.name();
        if name.chars().skip(1).any(|c| c.is_uppercase()) {
            name.to_string()
        } else {
            name.to_ascii_lowercase()
        }
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_is_lexicographically_ordered() {
        for pair in ObjectClass::ALL.windows(2) {
            assert!(
                pair[0].name() < pair[1].name(),
                "{} must sort before {}",
                pair[0],
                pair[1]
            );
        }
    }

    #[test]
    fn vocabulary_has_at_least_thirty_classes() {
        assert!(ObjectClass::ALL.len() >= 30);
    }

    #[test]
    fn required_classes_present_with_expected_kinds() {
        let openable = [
            ObjectClass::Fridge,
            ObjectClass::Microwave,
            ObjectClass::Cabinet,
            ObjectClass::Drawer,
        ];
        for c in openable {
            assert!(c.kind().openable && c.kind().receptacle, "{c} must be an openable receptacle");
        }
        let toggleable = [
            ObjectClass::Faucet,
            ObjectClass::DeskLamp,
            ObjectClass::Microwave,
            ObjectClass::CoffeeMachine,
        ];
        for c in toggleable {
            assert!(c.kind().toggleable, "{c} must be toggleable");
        }
        // Microwave carries both kinds at once.
        let m = ObjectClass::Microwave.kind();
        assert!(m.openable && m.receptacle && m.toggleable);
    }

    #[test]
    fn spoken_and_renamed_renderings() {
        assert_eq!(ObjectClass::SoapBottle.spoken_name(), "soap bottle");
        assert_eq!(ObjectClass::Potato.spoken_name(), "potato");
        assert_eq!(ObjectClass::SoapBottle.renamed_text(), "SoapBottle");
        assert_eq!(ObjectClass::Potato.renamed_text(), "potato");
        assert_eq!(ObjectClass::SideTable.renamed_text(), "SideTable");
    }

    #[test]
    fn name_round_trips() {
        for &c in ObjectClass::ALL {
            assert_eq!(ObjectClass::from_name(c.name()), Some(c));
        }
        assert_eq!(ObjectClass::from_name("Spaceship"), None);
    }
}
