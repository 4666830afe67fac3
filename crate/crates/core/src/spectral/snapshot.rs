//! Binary field snapshots.
//!
//! Byte layout (all multi-byte values in the byte order named by the tag):
//!
//! ```text
//! offset  size  content
//!      0     4  magic "MHDF"
//!      4     1  format version (1)
//!      5     1  endianness tag: 1 = little-endian, 2 = big-endian
//!      6     1  representation: 0 = physical, 1 = spectral
//!      7     1  grade mask (bit ℓ set iff grade ℓ is stored)
//!      8     4  n, u32
//!     12     8  period L, f64
//!     20     …  one block per stored blade, canonical blade order;
//!               each block holds n³ samples with x₁ fastest:
//!               physical → f64 per sample, spectral → (re, im) f64 pairs
//! ```
//!
//! Writers always emit little-endian.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{FormField, Grid, Representation};
use crate::error::{MhdError, Result};
use crate::lambda3::GradeMask;

const MAGIC: &[u8; 4] = b"MHDF";
const VERSION: u8 = 1;
const LITTLE: u8 = 1;
const BIG: u8 = 2;

pub fn write_snapshot<W: Write>(field: &FormField, mut w: W) -> Result<()> {
    let grid = field.grid();
    w.write_all(MAGIC)?;
    let repr = match field.representation() {
        Representation::Physical => 0u8,
        Representation::Spectral => 1u8,
    };
    w.write_all(&[VERSION, LITTLE, repr, field.mask().bits()])?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&grid.period().to_le_bytes())?;
    let mut buf = Vec::new();
    for blade in field.blades() {
        let comp = field.component(blade).expect("listed blade");
        buf.clear();
        for z in comp {
            buf.extend_from_slice(&z.re.to_le_bytes());
            if repr == 1 {
                buf.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        w.write_all(&buf)?;
    }
    Ok(())
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<FormField> {
    let mut header = [0u8; 20];
    r.read_exact(&mut header)?;
    if &header[0..4] != MAGIC {
        return Err(MhdError::Format("bad magic".into()));
    }
    if header[4] != VERSION {
        return Err(MhdError::Format(format!("unsupported version {}", header[4])));
    }
    let big = match header[5] {
        LITTLE => false,
        BIG => true,
        t => return Err(MhdError::Format(format!("unknown endianness tag {t}"))),
    };
    let repr = match header[6] {
        0 => Representation::Physical,
        1 => Representation::Spectral,
        t => return Err(MhdError::Format(format!("unknown representation {t}"))),
    };
    let mask = GradeMask::from_bits(header[7]).map_err(|_| MhdError::Format("bad grade mask".into()))?;
    let u32_at = |b: [u8; 4]| if big { u32::from_be_bytes(b) } else { u32::from_le_bytes(b) };
    let f64_at = |b: [u8; 8]| if big { f64::from_be_bytes(b) } else { f64::from_le_bytes(b) };
    let n = u32_at(header[8..12].try_into().unwrap()) as usize;
    let period = f64_at(header[12..20].try_into().unwrap());
    let grid = Grid::new(n, period)?;
    let blades = (0..8).filter(|&i| mask.contains_blade(i)).count();
    let per_sample = if repr == Representation::Spectral { 16 } else { 8 };
    let mut raw = vec![0u8; grid.len() * per_sample];
    let mut buffers = Vec::with_capacity(blades);
    for _ in 0..blades {
        r.read_exact(&mut raw)?;
        let comp = raw
            .chunks_exact(per_sample)
            .map(|c| {
                let re = f64_at(c[0..8].try_into().unwrap());
                let im = if per_sample == 16 { f64_at(c[8..16].try_into().unwrap()) } else { 0.0 };
                Complex64::new(re, im)
            })
            .collect();
        buffers.push(comp);
    }
    FormField::from_components(&grid, mask, repr, buffers)
}
