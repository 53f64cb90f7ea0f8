//! Binary checkpoints of a long product, taken after `2^k` letters.
//!
//! Layout, little endian:
//!
//! ```text
//! header  magic "CSCK" | version u8 = 1 | 3 reserved zero bytes | energy f64 | count u32
//! record  k u32 | factors u64 | m11 m12 m21 m22 f64 | log_scale f64 | log_det f64
//!         | orientation i8 | 7 zero bytes | word_hash u64
//! ```

use sha2::{Digest, Sha256};

use super::{Mat2, ScaledMatrix};
use crate::error::{Error, Result};
use crate::subshifts::SubshiftSystem;

pub const MAGIC: [u8; 4] = *b"CSCK";
pub const FORMAT_VERSION: u8 = 1;
const HEADER_LEN: usize = 20;
const RECORD_LEN: usize = 76;

/// First 8 bytes (little endian) of the SHA-256 of the letter ids.
pub fn word_hash(ids: &[u8]) -> u64 {
    let digest = Sha256::digest(ids);
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

fn prefix_hash(hasher: &Sha256) -> u64 {
    let digest = hasher.clone().finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub k: u32,
    pub factors: u64,
    pub mat: Mat2,
    pub log_scale: f64,
    pub log_det: f64,
    pub orientation: i8,
    pub word_hash: u64,
}

impl Checkpoint {
    fn capture(k: u32, p: &ScaledMatrix, word_hash: u64) -> Self {
        Checkpoint {
            k,
            factors: p.factors() as u64,
            mat: p.mat(),
            log_scale: p.log_scale(),
            log_det: p.log_det(),
            orientation: if p.orientation() < 0.0 { -1 } else { 1 },
            word_hash,
        }
    }

    pub fn restore(&self) -> Result<ScaledMatrix> {
        ScaledMatrix::from_parts(
            &self.mat,
            self.log_scale,
            self.log_det,
            self.orientation as f64,
            self.factors as usize,
        )
    }

    fn validate(&self) -> Result<()> {
        if self.k >= 64 || self.factors != 1u64 << self.k {
            return Err(Error::Parse(format!(
                "checkpoint k={} does not match factor count {}",
                self.k, self.factors
            )));
        }
        if !self.mat.is_finite() || !self.log_scale.is_finite() || !self.log_det.is_finite() {
            return Err(Error::Parse("non-finite checkpoint entry".into()));
        }
        let norm = self.mat.norm();
        if !(0.5..=2.0).contains(&norm) {
            return Err(Error::Parse(format!("checkpoint matrix norm {norm} outside [1/2, 2]")));
        }
        if self.orientation != 1 && self.orientation != -1 {
            return Err(Error::Parse("checkpoint orientation must be +1 or -1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointFile {
    pub energy: f64,
    pub records: Vec<Checkpoint>,
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos.checked_add(N).filter(|&e| e <= self.data.len());
        let end = end.ok_or_else(|| Error::Parse("truncated checkpoint file".into()))?;
        let out = self.data[self.pos..end].try_into().expect("slice has length N");
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

impl CheckpointFile {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * self.records.len());
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&[0; 3]);
        out.extend_from_slice(&self.energy.to_le_bytes());
        out.extend_from_slice(&(self.records.len() as u32).to_le_bytes());
        for r in &self.records {
            out.extend_from_slice(&r.k.to_le_bytes());
            out.extend_from_slice(&r.factors.to_le_bytes());
            for x in [r.mat.m11, r.mat.m12, r.mat.m21, r.mat.m22, r.log_scale, r.log_det] {
                out.extend_from_slice(&x.to_le_bytes());
            }
            out.push(r.orientation as u8);
            out.extend_from_slice(&[0; 7]);
            out.extend_from_slice(&r.word_hash.to_le_bytes());
        }
        out
    }

    pub fn decode(data: &[u8]) -> Result<Self> {
        let mut r = Reader { data, pos: 0 };
        if r.take::<4>()? != MAGIC {
            return Err(Error::Parse("not a checkpoint file (bad magic)".into()));
        }
        let [version] = r.take::<1>()?;
        if version != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported checkpoint version {version}")));
        }
        if r.take::<3>()? != [0; 3] {
            return Err(Error::Parse("reserved header bytes must be zero".into()));
        }
        let energy = r.f64()?;
        if !energy.is_finite() {
            return Err(Error::Parse("non-finite checkpoint energy".into()));
        }
        let count = r.u32()? as usize;
        let expected = count
            .checked_mul(RECORD_LEN)
            .and_then(|n| n.checked_add(HEADER_LEN));
        if expected != Some(data.len()) {
            return Err(Error::Parse(format!(
                "checkpoint file has {} bytes, header announces {count} records",
                data.len()
            )));
        }
        let mut records = Vec::with_capacity(count);
        for _ in 0..count {
            let k = r.u32()?;
            let factors = r.u64()?;
            let mat = Mat2::new(r.f64()?, r.f64()?, r.f64()?, r.f64()?);
            let log_scale = r.f64()?;
            let log_det = r.f64()?;
            let [orientation] = r.take::<1>()?;
            if r.take::<7>()? != [0; 7] {
                return Err(Error::Parse("checkpoint padding must be zero".into()));
            }
            let word_hash = r.u64()?;
            let c = Checkpoint {
                k,
                factors,
                mat,
                log_scale,
                log_det,
                orientation: orientation as i8,
                word_hash,
            };
            c.validate()?;
            if let Some(prev) = records.last() {
                let prev: &Checkpoint = prev;
                if prev.k >= c.k {
                    return Err(Error::Parse("checkpoint records must have increasing k".into()));
                }
            }
            records.push(c);
        }
        Ok(CheckpointFile { energy, records })
    }
}

/// Product over the canonical window of length `n`, checkpointed after
/// `1, 2, 4, ...` letters.
pub fn run_with_checkpoints(
    system: &SubshiftSystem,
    e: f64,
    n: usize,
) -> Result<(ScaledMatrix, CheckpointFile)> {
    if !e.is_finite() {
        return Err(Error::NonFinite(format!("energy {e}")));
    }
    let w = system.canonical_window(n)?;
    let values = system.potential().values();
    let mut p = ScaledMatrix::identity();
    let mut hasher = Sha256::new();
    let mut records = Vec::new();
    let mut next = 1usize;
    let mut k = 0u32;
    for (i, &id) in w.ids().iter().enumerate() {
        p.push_transfer(e - values[id as usize]);
        hasher.update([id]);
        if i + 1 == next {
            records.push(Checkpoint::capture(k, &p, prefix_hash(&hasher)));
            k += 1;
            next = next.saturating_mul(2);
        }
    }
    Ok((p, CheckpointFile { energy: e, records }))
}

/// Continues from the deepest checkpoint up to `n` letters, after checking
/// that the checkpointed prefix is the system's canonical window.
pub fn resume_from_checkpoints(
    system: &SubshiftSystem,
    file: &CheckpointFile,
    n: usize,
) -> Result<ScaledMatrix> {
    let last = file
        .records
        .last()
        .ok_or_else(|| Error::InvalidArgument("checkpoint file has no records".into()))?;
    let done = last.factors as usize;
    if done > n {
        return Err(Error::InvalidArgument(format!(
            "checkpoint already covers {done} letters, more than the requested {n}"
        )));
    }
    let w = system.canonical_window(n)?;
    if word_hash(&w.ids()[..done]) != last.word_hash {
        return Err(Error::InvalidArgument(
            "checkpoint word hash does not match this system's window".into(),
        ));
    }
    let values = system.potential().values();
    let mut p = last.restore()?;
    for &id in &w.ids()[done..] {
        p.push_transfer(file.energy - values[id as usize]);
    }
    Ok(p)
}
