use std::fmt;
use std::sync::Arc;

/// Place identifier. Place 0 is where programs start.
pub type Place = u32;

/// Variable and field names.
pub type Name = Arc<str>;

/// Exception constants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExcConst {
    /// Generic exception, also what a failing `finish` rethrows.
    E,
    /// Bad field selection or update.
    BF,
    /// Bad global reference.
    BG,
    /// Dead place.
    DP,
}

impl ExcConst {
    pub const ALL: [ExcConst; 4] = [ExcConst::E, ExcConst::BF, ExcConst::BG, ExcConst::DP];

    pub fn name(self) -> &'static str {
        match self {
            ExcConst::E => "E",
            ExcConst::BF => "BF",
            ExcConst::BG => "BG",
            ExcConst::DP => "DP",
        }
    }

    pub fn from_name(s: &str) -> Option<ExcConst> {
        ExcConst::ALL.into_iter().find(|e| e.name() == s)
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for ExcConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The exception set μ carried by a running `finish`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExcSet(u8);

impl ExcSet {
    pub const EMPTY: ExcSet = ExcSet(0);

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, e: ExcConst) -> bool {
        self.0 & e.bit() != 0
    }

    pub fn with(self, e: ExcConst) -> ExcSet {
        ExcSet(self.0 | e.bit())
    }

    pub fn iter(self) -> impl Iterator<Item = ExcConst> {
        ExcConst::ALL.into_iter().filter(move |e| self.contains(*e))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }
}

impl FromIterator<ExcConst> for ExcSet {
    fn from_iter<I: IntoIterator<Item = ExcConst>>(iter: I) -> Self {
        iter.into_iter().fold(ExcSet::EMPTY, ExcSet::with)
    }
}

impl fmt::Display for ExcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

/// Object id: a place and a serial in that place's enumeration order.
/// The home of an oid is its place component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Oid {
    pub place: Place,
    pub serial: u32,
}

impl Oid {
    pub fn new(place: Place, serial: u32) -> Oid {
        Oid { place, serial }
    }

    pub fn home(self) -> Place {
        self.place
    }
}

impl fmt::Display for Oid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o({},{})", self.place, self.serial)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    Oid(Oid),
    /// `o$p`; the home place is the oid's own place.
    GlobalRef(Oid),
    Exc(ExcConst),
}

impl Value {
    pub fn as_oid(self) -> Option<Oid> {
        match self {
            Value::Oid(o) => Some(o),
            _ => None,
        }
    }

    /// The oid a value names, either directly or through a global ref.
    pub fn named_oid(self) -> Option<Oid> {
        match self {
            Value::Oid(o) | Value::GlobalRef(o) => Some(o),
            Value::Exc(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Oid(o) => write!(f, "{o}"),
            Value::GlobalRef(o) => write!(f, "gr({},{})", o.place, o.serial),
            Value::Exc(e) => write!(f, "{e}"),
        }
    }
}

/// Transition labels: ok, asynchronous exception, synchronous exception.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Ok,
    AsyncExc(ExcConst),
    SyncExc(ExcConst),
}

impl Label {
    pub fn is_ok(self) -> bool {
        self == Label::Ok
    }

    pub fn exc(self) -> Option<ExcConst> {
        match self {
            Label::Ok => None,
            Label::AsyncExc(e) | Label::SyncExc(e) => Some(e),
        }
    }

    pub fn kind(self) -> &'static str {
        match self {
            Label::Ok => "ok",
            Label::AsyncExc(_) => "async",
            Label::SyncExc(_) => "sync",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Ok => f.write_str("ok"),
            Label::AsyncExc(e) => write!(f, "{e}x"),
            Label::SyncExc(e) => write!(f, "{e}!"),
        }
    }
}
