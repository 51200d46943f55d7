//! Class identifiers for the four-object underwater label set.

use core::fmt;

use crate::error::CoreError;

/// Per-pixel class label.
///
/// The value set is closed: background `0`, the four object classes `1..=4`
/// (holothurian, echinus, scallop, starfish), and the ignore label `255`
/// used for pixels excluded from supervision and scoring. Any other value is
/// rejected at construction so that masks stay bit-comparable across runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "u8", into = "u8"))]
pub struct ClassId(u8);

impl ClassId {
    pub const BACKGROUND: ClassId = ClassId(0);
    pub const HOLOTHURIAN: ClassId = ClassId(1);
    pub const ECHINUS: ClassId = ClassId(2);
    pub const SCALLOP: ClassId = ClassId(3);
    pub const STARFISH: ClassId = ClassId(4);
    pub const IGNORE: ClassId = ClassId(255);

    /// The four object classes, in palette order.
    pub const OBJECTS: [ClassId; 4] = [
        Self::HOLOTHURIAN,
        Self::ECHINUS,
        Self::SCALLOP,
        Self::STARFISH,
    ];

    /// Background plus the four object classes; the set scored by mIoU.
    pub const SCORED: [ClassId; 5] = [
        Self::BACKGROUND,
        Self::HOLOTHURIAN,
        Self::ECHINUS,
        Self::SCALLOP,
        Self::STARFISH,
    ];

    pub fn new(value: u8) -> Result<Self, CoreError> {
        match value {
            0..=4 | 255 => Ok(ClassId(value)),
            other => Err(CoreError::InvalidClass(other)),
        }
    }

    /// Constructs an object class (`1..=4`); background and ignore are rejected.
    pub fn object(value: u8) -> Result<Self, CoreError> {
        match value {
            1..=4 => Ok(ClassId(value)),
            other => Err(CoreError::InvalidClass(other)),
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_background(self) -> bool {
        self.0 == 0
    }

    pub fn is_ignore(self) -> bool {
        self.0 == 255
    }

    pub fn is_object(self) -> bool {
        (1..=4).contains(&self.0)
    }

    pub fn name(self) -> &'static str {
        match self.0 {
            0 => "background",
            1 => "holothurian",
            2 => "echinus",
            3 => "scallop",
            4 => "starfish",
            _ => "ignore",
        }
    }

    /// Inverse of [`ClassId::name`] for the annotation category names.
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "background" => Some(Self::BACKGROUND),
            "holothurian" => Some(Self::HOLOTHURIAN),
            "echinus" => Some(Self::ECHINUS),
            "scallop" => Some(Self::SCALLOP),
            "starfish" => Some(Self::STARFISH),
            "ignore" => Some(Self::IGNORE),
            _ => None,
        }
    }

    /// Index into `SCORED` for background and object classes.
    pub(crate) fn scored_index(self) -> Option<usize> {
        match self.0 {
            v @ 0..=4 => Some(v as usize),
            _ => None,
        }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl TryFrom<u8> for ClassId {
    type Error = CoreError;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        ClassId::new(value)
    }
}

impl From<ClassId> for u8 {
    fn from(c: ClassId) -> u8 {
        c.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_value_set() {
        for v in 0..=4u8 {
            assert!(ClassId::new(v).is_ok());
        }
        assert!(ClassId::new(255).is_ok());
        for v in [5u8, 6, 100, 254] {
            assert_eq!(ClassId::new(v), Err(CoreError::InvalidClass(v)));
        }
    }

    #[test]
    fn object_rejects_background_and_ignore() {
        assert!(ClassId::object(1).is_ok());
        assert!(ClassId::object(0).is_err());
        assert!(ClassId::object(255).is_err());
    }

    #[test]
    fn names_round_trip() {
        for c in ClassId::SCORED {
            assert_eq!(ClassId::from_name(c.name()), Some(c));
        }
        assert_eq!(ClassId::from_name("fish"), None);
    }
}
