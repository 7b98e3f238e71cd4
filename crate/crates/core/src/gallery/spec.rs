use std::fmt;
use std::str::FromStr;

use super::GalleryError;

/// Textual description of a gallery matrix:
///
/// ```text
/// hilb:<n>
/// invhilb:<n>
/// randcorr:<n>:<seed>
/// spiked:<n>:<r>:<beta>:<seed>
/// lowrank:<n>:<r>:<seed>
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixSpec {
    Hilbert { n: usize },
    InvHilbert { n: usize },
    RandCorr { n: usize, seed: u64 },
    Spiked { n: usize, r: usize, beta: f64, seed: u64 },
    LowRank { n: usize, r: usize, seed: u64 },
}

impl MatrixSpec {
    pub fn n(&self) -> usize {
        match *self {
            Self::Hilbert { n }
            | Self::InvHilbert { n }
            | Self::RandCorr { n, .. }
            | Self::Spiked { n, .. }
            | Self::LowRank { n, .. } => n,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Hilbert { .. } => "hilb",
            Self::InvHilbert { .. } => "invhilb",
            Self::RandCorr { .. } => "randcorr",
            Self::Spiked { .. } => "spiked",
            Self::LowRank { .. } => "lowrank",
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, Self::RandCorr { .. } | Self::Spiked { .. } | Self::LowRank { .. })
    }
}

impl fmt::Display for MatrixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Hilbert { n } => write!(f, "hilb:{n}"),
            Self::InvHilbert { n } => write!(f, "invhilb:{n}"),
            Self::RandCorr { n, seed } => write!(f, "randcorr:{n}:{seed}"),
            Self::Spiked { n, r, beta, seed } => write!(f, "spiked:{n}:{r}:{beta}:{seed}"),
            Self::LowRank { n, r, seed } => write!(f, "lowrank:{n}:{r}:{seed}"),
        }
    }
}

impl FromStr for MatrixSpec {
    type Err = GalleryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |token: &str, msg: &str| GalleryError::Parse {
            spec: s.to_string(),
            token: token.to_string(),
            msg: msg.to_string(),
        };
        let parts: Vec<&str> = s.trim().split(':').collect();
        let kind = parts[0];
        let args = &parts[1..];
        let arity = match kind {
            "hilb" | "invhilb" => 1,
            "randcorr" => 2,
            "lowrank" => 3,
            "spiked" => 4,
            _ => return Err(err(kind, "unknown matrix kind (expected hilb, invhilb, randcorr, spiked or lowrank)")),
        };
        if args.len() != arity {
            let token = args.get(arity).copied().unwrap_or(s);
            return Err(err(token, &format!("`{kind}` takes {arity} argument(s), got {}", args.len())));
        }
        let dim = |t: &str| -> Result<usize, GalleryError> {
            match t.parse::<usize>() {
                Ok(0) | Err(_) => Err(err(t, "expected a positive integer")),
                Ok(v) => Ok(v),
            }
        };
        let seed = |t: &str| t.parse::<u64>().map_err(|_| err(t, "expected an unsigned 64-bit seed"));

        let spec = match kind {
            "hilb" => Self::Hilbert { n: dim(args[0])? },
            "invhilb" => Self::InvHilbert { n: dim(args[0])? },
            "randcorr" => Self::RandCorr {
                n: dim(args[0])?,
                seed: seed(args[1])?,
            },
            "lowrank" => {
                let n = dim(args[0])?;
                let r = dim(args[1])?;
                if r > n {
                    return Err(err(args[1], "rank exceeds dimension"));
                }
                Self::LowRank { n, r, seed: seed(args[2])? }
            }
            "spiked" => {
                let n = dim(args[0])?;
                let r = dim(args[1])?;
                if r > n {
                    return Err(err(args[1], "rank exceeds dimension"));
                }
                let beta: f64 = args[2]
                    .parse()
                    .ok()
                    .filter(|b: &f64| *b > 0.0 && b.is_finite())
                    .ok_or_else(|| err(args[2], "beta must be a positive number"))?;
                Self::Spiked {
                    n,
                    r,
                    beta,
                    seed: seed(args[3])?,
                }
            }
            _ => unreachable!(),
        };
        Ok(spec)
    }
}
