use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Grid levels start at 1 (level 0 is the origin-only grid).
    InvalidLevel(u32),
    PointOutOfBox {
        x: f64,
        y: f64,
    },
    EmptyPointSet,
    LevelMismatch {
        left: u32,
        right: u32,
    },
    /// Two grid points on consecutive levels that are not one compass step apart.
    NotANeighbor,
    /// A direction string whose walk leaves the unit box.
    InvalidString,
    BlockSizeMismatch {
        block: usize,
        len: usize,
    },
    TooDeep {
        levels: usize,
        max_level: u32,
    },
    SizeMismatch {
        left: usize,
        right: usize,
    },
    TooLarge {
        size: usize,
        limit: usize,
    },
    BudgetExceeded {
        required: u128,
        budget: u64,
    },
    DuplicateId(String),
    Corrupt(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidLevel(d) => write!(f, "invalid grid level {d}"),
            Error::PointOutOfBox { x, y } => {
                write!(f, "point ({x}, {y}) lies outside the unit box")
            }
            Error::EmptyPointSet => f.write_str("point set is empty"),
            Error::LevelMismatch { left, right } => {
                write!(f, "grid level mismatch: {left} vs {right}")
            }
            Error::NotANeighbor => f.write_str("grid points are not one compass step apart"),
            Error::InvalidString => f.write_str("direction string walks outside the unit box"),
            Error::BlockSizeMismatch { block, len } => {
                write!(
                    f,
                    "string of length {len} is not a whole number of blocks of size {block}"
                )
            }
            Error::TooDeep { levels, max_level } => {
                write!(
                    f,
                    "string describes {levels} levels but the trie stops at {max_level}"
                )
            }
            Error::SizeMismatch { left, right } => {
                write!(f, "point set sizes differ: {left} vs {right}")
            }
            Error::TooLarge { size, limit } => {
                write!(f, "input of size {size} exceeds the limit {limit}")
            }
            Error::BudgetExceeded { required, budget } => write!(
                f,
                "multisnap enumeration needs {required} distributions, budget is {budget}"
            ),
            Error::DuplicateId(id) => write!(f, "duplicate point set id {id:?}"),
            Error::Corrupt(what) => write!(f, "corrupt index data: {what}"),
        }
    }
}

impl core::error::Error for Error {}
