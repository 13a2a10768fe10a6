//! Restartable snapshots: one field file per state component plus a text
//! manifest. Files for step `j` are `v_j.kvsf`, `y_pot_j.kvsf`,
//! `fbar_j.kvsf` (a matrix field with N = 0), `history_j.kvsf` for the
//! two-step scheme, and `checkpoint_j.txt`.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::Path;

use super::{KvState, SolverConfig};
use crate::error::{Error, Result};
use crate::matrix::Mat;
use crate::spectral::{read_field, write_field, Shape, SpectralField};

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub step: usize,
    pub state: KvState,
    /// Explicit term of the previous step (two-step scheme only).
    pub history: Option<SpectralField>,
    pub blowup_threshold: f64,
}

fn write_one(path: &Path, field: &SpectralField, t: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write_field(&mut w, field, t)?;
    use std::io::Write;
    w.flush()?;
    Ok(())
}

fn read_one(path: &Path) -> Result<(SpectralField, f64)> {
    read_field(BufReader::new(File::open(path)?))
}

pub fn write_checkpoint(dir: &Path, config: &SolverConfig, cp: &Checkpoint) -> Result<()> {
    fs::create_dir_all(dir)?;
    let j = cp.step;
    let t = cp.state.t;
    write_one(&dir.join(format!("v_{j}.kvsf")), &cp.state.v, t)?;
    write_one(&dir.join(format!("y_pot_{j}.kvsf")), &cp.state.y, t)?;
    let d = cp.state.dim();
    let mut fbar = SpectralField::zeros(d, 0, Shape::Matrix);
    for (c, &x) in cp.state.fbar.as_slice().iter().enumerate() {
        fbar.component_mut(c)[0] = x.into();
    }
    write_one(&dir.join(format!("fbar_{j}.kvsf")), &fbar, t)?;
    if let Some(h) = &cp.history {
        write_one(&dir.join(format!("history_{j}.kvsf")), h, t)?;
    }
    let manifest = format!(
        "{}step = {j}\ntime = {:.17e}\nblowup_threshold = {:.17e}\nhistory = {}\n",
        config.echo(),
        t,
        cp.blowup_threshold,
        cp.history.is_some()
    );
    fs::write(dir.join(format!("checkpoint_{j}.txt")), manifest)?;
    Ok(())
}

pub fn read_checkpoint(dir: &Path, step: usize) -> Result<Checkpoint> {
    let j = step;
    let manifest = fs::read_to_string(dir.join(format!("checkpoint_{j}.txt")))?;
    let value = |key: &str| -> Result<String> {
        manifest
            .lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.trim_start().strip_prefix('=')))
            .map(|v| v.trim().to_string())
            .ok_or_else(|| Error::Format(format!("manifest lacks `{key}`")))
    };
    let parse = |key: &str| -> Result<f64> {
        value(key)?.parse().map_err(|_| Error::Format(format!("bad `{key}` in manifest")))
    };
    let threshold = parse("blowup_threshold")?;
    let has_history = value("history")? == "true";
    let (v, t) = read_one(&dir.join(format!("v_{j}.kvsf")))?;
    let (y, _) = read_one(&dir.join(format!("y_pot_{j}.kvsf")))?;
    let (fbar_field, _) = read_one(&dir.join(format!("fbar_{j}.kvsf")))?;
    if fbar_field.shape() != Shape::Matrix || fbar_field.n() != 0 {
        return Err(Error::Format("fbar file is not a constant matrix field".into()));
    }
    let d = fbar_field.dim();
    let entries: Vec<f64> = (0..d * d).map(|c| fbar_field.component(c)[0].re).collect();
    let state = KvState::new(t, v, y, Mat::from_row_major(d, &entries))?;
    let history = if has_history { Some(read_one(&dir.join(format!("history_{j}.kvsf")))?.0) } else { None };
    Ok(Checkpoint { step, state, history, blowup_threshold: threshold })
}
