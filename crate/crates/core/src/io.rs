//! CSV and graymap output.
//!
//! Sinograms and grids are written as a pair of CSV files (real and imaginary
//! parts) whose first line is a `#`-comment of `key=value` metadata. Values use
//! Rust's shortest round-trip float formatting, so reading a file back gives the
//! exact in-memory numbers. Missing rays are written as `NaN`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geodesics::make_influx_grid;
use crate::grid::{cartesian_grid, ScalarGrid};
use crate::reconstruction::ErrorHistory;
use crate::transforms::Sinogram;

/// Metadata carried in the header line of a sinogram CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct SinogramHeader {
    pub n: usize,
    pub k: i32,
    pub metric: String,
    pub dt: f64,
}

fn part_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut name = prefix.file_name().map(|s| s.to_os_string()).unwrap_or_default();
        name.push(suffix);
        prefix.with_file_name(name)
    };
    (with("_re.csv"), with("_im.csv"))
}

fn write_table<W: Write>(mut w: W, header: &str, rows: usize, cols: usize, value: impl Fn(usize, usize) -> f64) -> Result<()> {
    writeln!(w, "# {header}")?;
    let mut line = String::new();
    for r in 0..rows {
        line.clear();
        for c in 0..cols {
            if c > 0 {
                line.push(',');
            }
            line.push_str(&value(r, c).to_string());
        }
        writeln!(w, "{line}")?;
    }
    w.flush()?;
    Ok(())
}

fn read_table(path: &Path) -> Result<(Vec<(String, String)>, Vec<Vec<f64>>)> {
    let reader = BufReader::new(File::open(path)?);
    let mut meta = Vec::new();
    let mut rows = Vec::new();
    for (no, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if let Some(comment) = line.strip_prefix('#') {
            for pair in comment.split_whitespace() {
                let (k, v) = pair
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("{}:{}: bad header field '{pair}'", path.display(), no + 1)))?;
                meta.push((k.to_string(), v.to_string()));
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), no + 1))))
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((meta, rows))
}

fn lookup<T: std::str::FromStr>(meta: &[(String, String)], key: &str) -> Result<T> {
    let raw = meta
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| Error::Parse(format!("missing header field '{key}'")))?;
    raw.parse().map_err(|_| Error::Parse(format!("bad value '{raw}' for '{key}'")))
}

/// Writes `<prefix>_re.csv` and `<prefix>_im.csv`; row = β index, column = α index.
pub fn write_sinogram_csv(prefix: &Path, s: &Sinogram, header: &SinogramHeader) -> Result<()> {
    let meta = format!("n={} k={} metric={} dt={}", header.n, header.k, header.metric, header.dt);
    let (re, im) = part_paths(prefix);
    let (rows, cols) = (s.grid.n_beta(), s.grid.n_alpha());
    let at = |r: usize, c: usize| (s.missing[r * cols + c], s.values[r * cols + c]);
    write_table(BufWriter::new(File::create(re)?), &meta, rows, cols, |r, c| match at(r, c) {
        (true, _) => f64::NAN,
        (false, v) => v.re,
    })?;
    write_table(BufWriter::new(File::create(im)?), &meta, rows, cols, |r, c| match at(r, c) {
        (true, _) => f64::NAN,
        (false, v) => v.im,
    })
}

pub fn read_sinogram_csv(prefix: &Path) -> Result<(Sinogram, SinogramHeader)> {
    let (re, im) = part_paths(prefix);
    let (meta, re_rows) = read_table(&re)?;
    let (_, im_rows) = read_table(&im)?;
    let header = SinogramHeader {
        n: lookup(&meta, "n")?,
        k: lookup(&meta, "k")?,
        metric: lookup(&meta, "metric")?,
        dt: lookup(&meta, "dt")?,
    };
    let mut s = Sinogram::zeros(&make_influx_grid(header.n)?);
    let (rows, cols) = (s.grid.n_beta(), s.grid.n_alpha());
    check_shape(&re_rows, rows, cols)?;
    check_shape(&im_rows, rows, cols)?;
    for r in 0..rows {
        for c in 0..cols {
            let (a, b) = (re_rows[r][c], im_rows[r][c]);
            if a.is_nan() || b.is_nan() {
                s.missing[r * cols + c] = true;
            } else {
                s.values[r * cols + c] = Complex64::new(a, b);
            }
        }
    }
    Ok((s, header))
}

fn check_shape(rows: &[Vec<f64>], n_rows: usize, n_cols: usize) -> Result<()> {
    if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::ShapeMismatch(format!("expected {n_rows} rows of {n_cols} values")));
    }
    Ok(())
}

/// Writes `<prefix>_re.csv` and `<prefix>_im.csv`; row = y index, column = x index.
pub fn write_grid_csv(prefix: &Path, g: &ScalarGrid) -> Result<()> {
    let meta = format!("n={} eps_mask={}", g.n, g.eps_mask);
    let (re, im) = part_paths(prefix);
    write_table(BufWriter::new(File::create(re)?), &meta, g.n, g.n, |r, c| g.values[r * g.n + c].re)?;
    write_table(BufWriter::new(File::create(im)?), &meta, g.n, g.n, |r, c| g.values[r * g.n + c].im)
}

pub fn read_grid_csv(prefix: &Path) -> Result<ScalarGrid> {
    let (re, im) = part_paths(prefix);
    let (meta, re_rows) = read_table(&re)?;
    let (_, im_rows) = read_table(&im)?;
    let mut g = cartesian_grid(lookup(&meta, "n")?, lookup(&meta, "eps_mask")?)?;
    check_shape(&re_rows, g.n, g.n)?;
    check_shape(&im_rows, g.n, g.n)?;
    for r in 0..g.n {
        for c in 0..g.n {
            g.values[r * g.n + c] = Complex64::new(re_rows[r][c], im_rows[r][c]);
        }
    }
    Ok(g)
}

/// `iter,rel_l2,update_norm,trapped_fraction`, one row per iteration (1-based).
pub fn write_errors_csv<W: Write>(mut w: W, h: &ErrorHistory) -> Result<()> {
    writeln!(w, "iter,rel_l2,update_norm,trapped_fraction")?;
    for (i, update) in h.update_norms.iter().enumerate() {
        let rel = h.rel_l2.get(i).copied().unwrap_or(f64::NAN);
        let trapped = h.trapped_fraction.get(i).copied().unwrap_or(0.0);
        writeln!(w, "{},{rel},{update},{trapped}", i + 1)?;
    }
    Ok(())
}

/// Binary 8-bit graymap of `values` (row-major, `width` per row) with linear
/// min-max scaling; the range goes to `<path>.scale.txt`.
pub fn write_pgm(path: &Path, values: &[f64], width: usize) -> Result<()> {
    if width == 0 || values.len() % width != 0 {
        return Err(Error::ShapeMismatch(format!("{} values do not fill rows of {width}", values.len())));
    }
    let height = values.len() / width;
    let (lo, hi) = values.iter().filter(|v| v.is_finite()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (0.0, 0.0) };
    let span = hi - lo;
    let pixels: Vec<u8> = values
        .iter()
        .map(|&v| if span > 0.0 && v.is_finite() { (255.0 * (v - lo) / span).round() as u8 } else { 0 })
        .collect();
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(&pixels)?;
    w.flush()?;
    let mut sidecar = path.as_os_str().to_os_string();
    sidecar.push(".scale.txt");
    std::fs::write(sidecar, format!("min={lo}\nmax={hi}\n"))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Point;
    use proptest::prelude::*;

    #[test]
    fn sinogram_round_trip_keeps_missing_marks() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Sinogram::zeros(&make_influx_grid(8).unwrap());
        for (i, v) in s.values.iter_mut().enumerate() {
            *v = Complex64::new(i as f64 / 7.0, -(i as f64).sqrt());
        }
        s.missing[5] = true;
        let header = SinogramHeader { n: 8, k: -3, metric: "lens:0.6".into(), dt: 1.0 / 64.0 };
        let prefix = dir.path().join("sino");
        write_sinogram_csv(&prefix, &s, &header).unwrap();
        let (back, h) = read_sinogram_csv(&prefix).unwrap();
        assert_eq!(h, header);
        assert_eq!(back.missing, s.missing);
        for i in 0..s.values.len() {
            if !s.missing[i] {
                assert_eq!(back.values[i], s.values[i]);
            }
        }
        let first = std::fs::read_to_string(dir.path().join("sino_re.csv")).unwrap();
        assert!(first.starts_with("# n=8 k=-3 metric=lens:0.6 dt=0.015625\n"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn grid_round_trip_is_exact(seed in any::<u64>(), n in 8usize..20) {
            let dir = tempfile::tempdir().unwrap();
            let g = ScalarGrid::from_fn(n, 0.1, |p: Point| {
                let s = (seed % 1000) as f64 / 37.0;
                Complex64::new((s * p.x).sin() / 3.0, (p.y * 1e-7 + s).exp())
            }).unwrap();
            let prefix = dir.path().join("g");
            write_grid_csv(&prefix, &g).unwrap();
            prop_assert_eq!(read_grid_csv(&prefix).unwrap(), g);
        }
    }

    #[test]
    fn errors_csv_layout() {
        let h = ErrorHistory { rel_l2: vec![0.5, 0.25], update_norms: vec![1.0, 0.1], trapped_fraction: vec![0.0, 0.0] };
        let mut buf = Vec::new();
        write_errors_csv(&mut buf, &h).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iter,rel_l2,update_norm,trapped_fraction\n1,0.5,1,0\n2,0.25,0.1,0\n");
    }

    #[test]
    fn pgm_scaling_and_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.pgm");
        write_pgm(&path, &[-1.0, 0.0, 1.0, 3.0], 2).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert!(bytes.starts_with(b"P5\n2 2\n255\n"));
        assert_eq!(&bytes[bytes.len() - 4..], &[0, 64, 128, 255]);
        assert_eq!(std::fs::read_to_string(dir.path().join("img.pgm.scale.txt")).unwrap(), "min=-1\nmax=3\n");
        assert!(write_pgm(&path, &[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("bad_re.csv"), "# n=8 eps_mask=0\n1,2\n").unwrap();
        std::fs::write(dir.path().join("bad_im.csv"), "# n=8 eps_mask=0\n1,x\n").unwrap();
        assert!(matches!(read_grid_csv(&dir.path().join("bad")), Err(Error::Parse(_))));
    }
}
