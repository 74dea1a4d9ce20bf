//! Legendrian front bookkeeping and Steinification of handlebodies.
//!
//! A front is recorded only through its counts: writhe and the numbers of
//! right, up and down cusps. That is enough for the Thurston–Bennequin
//! number, the rotation number and stabilization.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::handlebody::{self, Handlebody2};

/// Combinatorial shadow of a Legendrian front.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FrontCounts {
    writhe: i64,
    right: i64,
    up: i64,
    down: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flipped(self) -> Self {
        match self {
            Self::Positive => Self::Negative,
            Self::Negative => Self::Positive,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Positive => "+",
            Self::Negative => "-",
        })
    }
}

impl FrontCounts {
    /// Validates `right ≥ 1`, non-negative cusp counts and
    /// `up + down = 2·right`.
    pub fn new(writhe: i64, right: i64, up: i64, down: i64) -> Result<Self> {
        if right < 1 || up < 0 || down < 0 {
            return Err(Error::Invariant(format!(
                "cusp counts right={right} up={up} down={down} out of range"
            )));
        }
        if up + down != 2 * right {
            return Err(Error::Invariant(format!(
                "up + down = {} but 2 x right = {}",
                up + down,
                2 * right
            )));
        }
        Ok(Self {
            writhe,
            right,
            up,
            down,
        })
    }

    /// Standard front of the Legendrian unknot with `tb = -1`.
    pub fn unknot() -> Self {
        Self {
            writhe: 0,
            right: 1,
            up: 1,
            down: 1,
        }
    }

    pub fn writhe(&self) -> i64 {
        self.writhe
    }

    pub fn right_cusps(&self) -> i64 {
        self.right
    }

    pub fn up_cusps(&self) -> i64 {
        self.up
    }

    pub fn down_cusps(&self) -> i64 {
        self.down
    }

    pub fn thurston_bennequin(&self) -> i64 {
        self.writhe - self.right
    }

    pub fn rotation(&self) -> i64 {
        (self.down - self.up) / 2
    }

    /// Adds a zig-zag: one more right cusp and two more down (`+`) or up
    /// (`-`) cusps.
    pub fn stabilize(&self, sign: Sign) -> Self {
        let mut f = *self;
        f.right += 1;
        match sign {
            Sign::Positive => f.down += 2,
            Sign::Negative => f.up += 2,
        }
        f
    }

    /// Raises `tb` by `p` through `p` extra positive crossings.
    pub fn add_writhe(&self, p: i64) -> Self {
        let mut f = *self;
        f.writhe += p;
        f
    }
}

pub fn thurston_bennequin(f: &FrontCounts) -> i64 {
    f.thurston_bennequin()
}

pub fn rotation(f: &FrontCounts) -> i64 {
    f.rotation()
}

pub fn stabilize(f: &FrontCounts, sign: Sign) -> FrontCounts {
    f.stabilize(sign)
}

/// Tunables for [`steinify_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SteinifyConfig {
    /// Framing given to the 2-handle introduced by each W⁺ modification.
    /// Its front has `tb = 2`, so the value must be at most 1.
    pub w_handle_framing: i64,
}

/// One step taken by the Steinification algorithm. Handle ids are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SteinAction {
    Stabilize {
        handle: usize,
        sign: Sign,
    },
    WPlus {
        handle: usize,
        p: i64,
        new_handle: usize,
    },
}

impl fmt::Display for SteinAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Stabilize { handle, sign } => write!(f, "stabilize handle={handle} sign={sign}"),
            Self::WPlus {
                handle,
                p,
                new_handle,
            } => {
                write!(f, "wplus handle={handle} p={p} new_handle={new_handle}")
            }
        }
    }
}

fn front_of(h: &Handlebody2, id: usize) -> Result<FrontCounts> {
    h.two_handles()[id - 1]
        .front
        .ok_or_else(|| Error::Precondition(format!("2-handle {id} has no front data")))
}

fn framing_i64(h: &Handlebody2, id: usize) -> Result<i64> {
    let f: &BigInt = h.framing(id);
    i64::try_from(f).map_err(|_| Error::Capacity(format!("framing {f} of 2-handle {id} too large")))
}

fn stabilize_down(
    h: &mut Handlebody2,
    id: usize,
    count: i64,
    log: &mut Vec<SteinAction>,
) -> Result<()> {
    let mut sign = Sign::Positive;
    let mut front = front_of(h, id)?;
    for _ in 0..count {
        front = front.stabilize(sign);
        log.push(SteinAction::Stabilize { handle: id, sign });
        sign = sign.flipped();
    }
    h.set_front(id, Some(front))
}

/// Makes every 2-handle satisfy `framing = tb − 1` without changing any
/// framing: handles with `framing < tb − 1` are stabilized with alternating
/// signs starting from `+`; handles with `framing ≥ tb` receive one W⁺
/// modification with `p = framing − tb + 1`, whose new handle is then
/// stabilized in the same way.
pub fn steinify_with(
    h: &Handlebody2,
    config: &SteinifyConfig,
) -> Result<(Handlebody2, Vec<SteinAction>)> {
    if config.w_handle_framing > 1 {
        return Err(Error::InvalidValue(format!(
            "W handle framing {} exceeds its tb - 1 = 1",
            config.w_handle_framing
        )));
    }
    let n = h.two_handles().len();
    for id in 1..=n {
        front_of(h, id)?;
    }
    let mut out = h.clone();
    let mut log = Vec::new();
    for id in 1..=n {
        let f = framing_i64(&out, id)?;
        let t = front_of(&out, id)?.thurston_bennequin();
        if f < t {
            stabilize_down(&mut out, id, t - 1 - f, &mut log)?;
            continue;
        }
        let p = f - t + 1;
        out = handlebody::w_plus(&out, id, p)?;
        let new_id = out.two_handles().len();
        out.set_framing(new_id, BigInt::from(config.w_handle_framing))?;
        log.push(SteinAction::WPlus {
            handle: id,
            p,
            new_handle: new_id,
        });
        let t_new = front_of(&out, new_id)?.thurston_bennequin();
        stabilize_down(
            &mut out,
            new_id,
            t_new - 1 - config.w_handle_framing,
            &mut log,
        )?;
    }
    Ok((out, log))
}

/// [`steinify_with`] under the default configuration, without the log.
pub fn steinify(h: &Handlebody2) -> Result<Handlebody2> {
    steinify_with(h, &SteinifyConfig::default()).map(|(h, _)| h)
}

/// Whether every 2-handle carries a front with `framing = tb − 1`.
pub fn is_stein(h: &Handlebody2) -> bool {
    (1..=h.two_handles().len()).all(|id| match h.two_handles()[id - 1].front {
        Some(f) => *h.framing(id) == BigInt::from(f.thurston_bennequin() - 1),
        None => false,
    })
}
