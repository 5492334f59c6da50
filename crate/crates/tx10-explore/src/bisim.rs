//! Bounded weak bisimulation as a game.
//!
//! At depth 0 two configurations only need to agree on the immediate
//! clause: both terminated with equal heaps, or both running over the same
//! heap and agreeing on `isSync`. At depth d > 0 they must also survive one
//! round: for every environment move, every place and every step of either
//! side, the other side answers with a weak step carrying the same label
//! into a pair that holds at depth d - 1.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;
use std::rc::Rc;

use tx10_heap::{fail_place, GlobalHeap};
use tx10_sem::{label_text, Config, EngineFault, Semantics, Stepper};
use tx10_syntax::{is_sync, Label, Place};

use crate::canon::canonicalize_pair;
use crate::env::{env_move_universe, EnvMove};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    ConfigMismatch {
        reason: String,
    },
    /// `side` steps with `label` to `target` after `env` at `place`; every
    /// weak answer of the other side loses the remaining game.
    Challenge {
        env: EnvMove,
        place: Place,
        side: Side,
        label: Label,
        target: Config,
        responses: Vec<(Config, Witness)>,
    },
}

impl Witness {
    /// Rounds needed to expose the difference.
    pub fn depth(&self) -> usize {
        match self {
            Witness::ConfigMismatch { .. } => 0,
            Witness::Challenge { responses, .. } => {
                1 + responses.iter().map(|(_, w)| w.depth()).max().unwrap_or(0)
            }
        }
    }

    /// The first line of each level, following the first response.
    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = self;
        let mut indent = String::new();
        loop {
            match cur {
                Witness::ConfigMismatch { reason } => {
                    out.push(format!("{indent}mismatch {reason}"));
                    return out;
                }
                Witness::Challenge {
                    env,
                    place,
                    side,
                    label,
                    target,
                    responses,
                } => {
                    out.push(format!(
                        "{indent}env={env} place={place} side={side} label={} target={target} answers={}",
                        label_text(*label),
                        responses.len()
                    ));
                    match responses.first() {
                        Some((r, w)) => {
                            out.push(format!("{indent}  answer {r}"));
                            cur = w;
                        }
                        None => {
                            out.push(format!("{indent}  no answer"));
                            return out;
                        }
                    }
                }
            }
            indent.push_str("  ");
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BisimVerdict {
    BisimilarUpTo(usize),
    Distinguished { depth: usize, witness: Witness },
}

impl BisimVerdict {
    pub fn is_bisimilar(&self) -> bool {
        matches!(self, BisimVerdict::BisimilarUpTo(_))
    }
}

impl fmt::Display for BisimVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BisimVerdict::BisimilarUpTo(d) => write!(f, "BisimilarUpTo({d})"),
            BisimVerdict::Distinguished { depth, .. } => write!(f, "Distinguished({depth})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BisimOptions {
    pub stepper: Stepper,
    pub depth: usize,
    /// Place ids the judgment ranges over; dead ones included.
    pub places: u32,
    /// Apply environment moves; off means only the identity.
    pub env_moves: bool,
}

impl BisimOptions {
    pub fn new(sem: Semantics, places: u32, depth: usize) -> Self {
        BisimOptions {
            stepper: Stepper::new(sem),
            depth,
            places,
            env_moves: true,
        }
    }

    fn resilient(&self) -> bool {
        self.stepper.sem == Semantics::Resilient
    }
}

/// One step of a side at a place: a rule transition or, in resilient
/// mode, the failure of the judgment place (a silent step).
#[derive(Clone, Debug)]
struct Move {
    label: Label,
    target: Config,
}

#[derive(Clone, Copy, Debug, Default)]
struct Known {
    holds_up_to: Option<usize>,
    fails_from: Option<usize>,
}

type WeakKey = (Config, Place, Label);
type MovesCache = RefCell<HashMap<(Config, Place), Rc<Vec<Move>>>>;

/// Entries per step cache before it is dropped.
const CACHE_LIMIT: usize = 200_000;

pub struct Game {
    opts: BisimOptions,
    memo: HashMap<(Config, Config), Known>,
    moves_cache: MovesCache,
    weak_cache: RefCell<HashMap<WeakKey, Rc<Vec<Config>>>>,
    pub evaluated: usize,
}

fn config_clause(k1: &Config, k2: &Config) -> Option<String> {
    match (k1, k2) {
        (Config::Done(g1), Config::Done(g2)) => {
            (g1 != g2).then(|| format!("final heaps {} vs {}", g1.digest(), g2.digest()))
        }
        (Config::Running(s1, g1), Config::Running(s2, g2)) => {
            if g1 != g2 {
                Some(format!("heaps {} vs {}", g1.digest(), g2.digest()))
            } else if is_sync(s1) != is_sync(s2) {
                Some(format!("isSync {} vs {}", is_sync(s1), is_sync(s2)))
            } else {
                None
            }
        }
        _ => Some(format!("done vs running: {k1} / {k2}")),
    }
}

impl Game {
    pub fn new(opts: BisimOptions) -> Self {
        Game {
            opts,
            memo: HashMap::new(),
            moves_cache: RefCell::default(),
            weak_cache: RefCell::default(),
            evaluated: 0,
        }
    }

    fn trim_caches(&self) {
        if self.moves_cache.borrow().len() > CACHE_LIMIT {
            self.moves_cache.borrow_mut().clear();
        }
        if self.weak_cache.borrow().len() > CACHE_LIMIT {
            self.weak_cache.borrow_mut().clear();
        }
    }

    fn moves(&self, k: &Config, p: Place) -> Result<Rc<Vec<Move>>, EngineFault> {
        let ck = (k.clone(), p);
        if let Some(m) = self.moves_cache.borrow().get(&ck) {
            return Ok(m.clone());
        }
        let m = Rc::new(self.compute_moves(k, p)?);
        self.moves_cache.borrow_mut().insert(ck, m.clone());
        Ok(m)
    }

    fn compute_moves(&self, k: &Config, p: Place) -> Result<Vec<Move>, EngineFault> {
        let Config::Running(s, g) = k else {
            return Ok(vec![]);
        };
        let mut out: Vec<Move> = self
            .opts
            .stepper
            .transitions(s, g, p)?
            .into_iter()
            .map(|t| Move {
                label: t.label,
                target: t.target,
            })
            .collect();
        if self.opts.resilient() && p != 0 && g.is_live(p) {
            out.push(Move {
                label: Label::Ok,
                target: Config::Running(s.clone(), fail_place(g, p)?),
            });
        }
        Ok(out)
    }

    fn silent_closure(&self, k: &Config, p: Place) -> Result<Rc<Vec<Config>>, EngineFault> {
        self.weak(k, p, Label::Ok)
    }

    /// Everything reachable by `⇒λ` at `p`, in discovery order.
    fn weak(&self, k: &Config, p: Place, label: Label) -> Result<Rc<Vec<Config>>, EngineFault> {
        let ck = (k.clone(), p, label);
        if let Some(w) = self.weak_cache.borrow().get(&ck) {
            return Ok(w.clone());
        }
        let out = if label.is_ok() {
            let mut seen = HashSet::from([k.clone()]);
            let mut out = Vec::new();
            let mut queue = VecDeque::from([k.clone()]);
            while let Some(c) = queue.pop_front() {
                for m in self.moves(&c, p)?.iter() {
                    if m.label.is_ok() && seen.insert(m.target.clone()) {
                        queue.push_back(m.target.clone());
                    }
                }
                out.push(c);
            }
            out
        } else {
            let mut seen = HashSet::new();
            let mut out = Vec::new();
            for c in self.silent_closure(k, p)?.iter() {
                for m in self.moves(c, p)?.iter() {
                    if m.label == label {
                        for r in self.silent_closure(&m.target, p)?.iter() {
                            if seen.insert(r.clone()) {
                                out.push(r.clone());
                            }
                        }
                    }
                }
            }
            out
        };
        let out = Rc::new(out);
        self.weak_cache.borrow_mut().insert(ck, out.clone());
        Ok(out)
    }

    /// Environment moves with distinct effects.
    fn env_moves(&self, k: &Config) -> Vec<(EnvMove, GlobalHeap)> {
        if !self.opts.env_moves {
            return vec![(EnvMove::Identity, k.heap().clone())];
        }
        let mut seen = BTreeSet::new();
        env_move_universe(k, self.opts.resilient())
            .into_iter()
            .map(|m| {
                let g = m.apply_heap(k.heap());
                (m, g)
            })
            .filter(|(_, g)| seen.insert(g.clone()))
            .collect()
    }

    /// Whether the pair holds for `d` rounds.
    pub fn holds(&mut self, k1: &Config, k2: &Config, d: usize) -> Result<bool, EngineFault> {
        if config_clause(k1, k2).is_some() {
            return Ok(false);
        }
        if d == 0 || k1 == k2 {
            return Ok(true);
        }
        let pair = canonicalize_pair(k1, k2);
        if pair.0 == pair.1 {
            return Ok(true);
        }
        let known = self.memo.get(&pair).copied().unwrap_or_default();
        if known.holds_up_to.is_some_and(|h| h >= d) {
            return Ok(true);
        }
        if known.fails_from.is_some_and(|f| f <= d) {
            return Ok(false);
        }
        self.evaluated += 1;
        self.trim_caches();
        let ok = self.find_challenge(&pair.0, &pair.1, d)?.is_none();
        let e = self.memo.entry(pair).or_default();
        if ok {
            e.holds_up_to = Some(e.holds_up_to.map_or(d, |h| h.max(d)));
        } else {
            e.fails_from = Some(e.fails_from.map_or(d, |f| f.min(d)));
        }
        Ok(ok)
    }

    /// A winning challenge against the pair at depth `d`, if any.
    #[allow(clippy::type_complexity)]
    fn find_challenge(
        &mut self,
        k1: &Config,
        k2: &Config,
        d: usize,
    ) -> Result<Option<(EnvMove, Place, Side, Label, Config, Vec<Config>)>, EngineFault> {
        if k1.is_done() {
            return Ok(None);
        }
        for (env, _) in self.env_moves(k1) {
            let a = env.apply(k1);
            let b = env.apply(k2);
            for p in 0..self.opts.places {
                for side in [Side::Left, Side::Right] {
                    let (me, other) = if side == Side::Left {
                        (&a, &b)
                    } else {
                        (&b, &a)
                    };
                    for m in self.moves(me, p)?.iter() {
                        let answers = self.weak(other, p, m.label)?;
                        let mut matched = false;
                        for r in answers.iter() {
                            let (x, y) = if side == Side::Left {
                                (&m.target, r)
                            } else {
                                (r, &m.target)
                            };
                            if self.holds(x, y, d - 1)? {
                                matched = true;
                                break;
                            }
                        }
                        if !matched {
                            return Ok(Some((
                                env,
                                p,
                                side,
                                m.label,
                                m.target.clone(),
                                answers.to_vec(),
                            )));
                        }
                    }
                }
            }
        }
        Ok(None)
    }

    /// A witness for a pair that fails at depth `d`.
    pub fn witness(&mut self, k1: &Config, k2: &Config, d: usize) -> Result<Witness, EngineFault> {
        if let Some(reason) = config_clause(k1, k2) {
            return Ok(Witness::ConfigMismatch { reason });
        }
        let (env, place, side, label, target, answers) = self
            .find_challenge(k1, k2, d)?
            .expect("witness requested for a pair that holds");
        let mut responses = Vec::new();
        for r in answers {
            let (x, y) = if side == Side::Left {
                (&target, &r)
            } else {
                (&r, &target)
            };
            let w = self.witness_min(x, y, d - 1)?;
            responses.push((r, w));
        }
        Ok(Witness::Challenge {
            env,
            place,
            side,
            label,
            target,
            responses,
        })
    }

    fn witness_min(&mut self, k1: &Config, k2: &Config, d: usize) -> Result<Witness, EngineFault> {
        for i in 0..=d {
            if !self.holds(k1, k2, i)? {
                return self.witness(k1, k2, i);
            }
        }
        unreachable!("pair holds at depth {d}")
    }

    pub fn verdict(&mut self, k1: &Config, k2: &Config) -> Result<BisimVerdict, EngineFault> {
        for d in 0..=self.opts.depth {
            if !self.holds(k1, k2, d)? {
                let witness = self.witness(k1, k2, d)?;
                return Ok(BisimVerdict::Distinguished { depth: d, witness });
            }
        }
        Ok(BisimVerdict::BisimilarUpTo(self.opts.depth))
    }

    /// Re-derive a witness from scratch: every recorded step exists, the
    /// recorded answers are exactly the weak answers, and each answer's
    /// sub-witness replays.
    pub fn replay(&self, k1: &Config, k2: &Config, w: &Witness) -> Result<(), String> {
        match w {
            Witness::ConfigMismatch { .. } => match config_clause(k1, k2) {
                Some(_) => Ok(()),
                None => Err(format!("pair agrees: {k1} / {k2}")),
            },
            Witness::Challenge {
                env,
                place,
                side,
                label,
                target,
                responses,
            } => {
                if !env_move_universe(k1, self.opts.resilient()).contains(env)
                    && *env != EnvMove::Identity
                {
                    return Err(format!("{env} is not an environment move here"));
                }
                let a = env.apply(k1);
                let b = env.apply(k2);
                let (me, other) = if *side == Side::Left {
                    (&a, &b)
                } else {
                    (&b, &a)
                };
                let mv = self.moves(me, *place).map_err(|e| e.to_string())?;
                if !mv.iter().any(|m| m.label == *label && m.target == *target) {
                    return Err(format!("no {side} step {label:?} to {target}"));
                }
                let answers = self
                    .weak(other, *place, *label)
                    .map_err(|e| e.to_string())?;
                let want: HashSet<&Config> = answers.iter().collect();
                let got: HashSet<&Config> = responses.iter().map(|(r, _)| r).collect();
                if want != got {
                    return Err(format!(
                        "answers differ: expected {} got {}",
                        want.len(),
                        got.len()
                    ));
                }
                for (r, sub) in responses {
                    let (x, y) = if *side == Side::Left {
                        (target, r)
                    } else {
                        (r, target)
                    };
                    self.replay(x, y, sub)?;
                }
                Ok(())
            }
        }
    }
}

/// Places mentioned by either configuration, dead ones included.
pub fn place_count(k1: &Config, k2: &Config) -> u32 {
    let mut n = 1;
    for k in [k1, k2] {
        if let Some(&p) = k.heap().places().keys().next_back() {
            n = n.max(p + 1);
        }
        if let Some(p) = k.stmt().and_then(|s| s.max_place()) {
            n = n.max(p + 1);
        }
    }
    n
}

pub fn weak_bisim(
    k1: &Config,
    k2: &Config,
    opts: &BisimOptions,
) -> Result<BisimVerdict, EngineFault> {
    Game::new(opts.clone()).verdict(k1, k2)
}
