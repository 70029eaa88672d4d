//! Dense Matrix Market (`array`) files and factor bundles.
//!
//! A bundle is a directory holding `manifest.txt` (`key=value` lines for
//! `m`, `n`, `rank`, `scalar`) and `left.mtx`, `middle.mtx`, `right.mtx`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::{CMat, Error, LowRankFactors, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scalar {
    Real,
    Complex,
}

impl Scalar {
    pub fn name(self) -> &'static str {
        match self {
            Scalar::Real => "real",
            Scalar::Complex => "complex",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "real" | "integer" => Ok(Scalar::Real),
            "complex" => Ok(Scalar::Complex),
            other => Err(Error::MatrixMarket(format!("unsupported field {other:?}"))),
        }
    }

    /// `Real` when every entry has zero imaginary part.
    pub fn of(m: &CMat) -> Self {
        if m.iter().all(|z| z.im == 0.0) {
            Scalar::Real
        } else {
            Scalar::Complex
        }
    }
}

/// Column-major array format with 17 significant digits, which round-trips
/// every `f64` exactly.
pub fn format_mtx(m: &CMat, scalar: Scalar) -> String {
    let mut out = format!("%%MatrixMarket matrix array {} general\n{} {}\n", scalar.name(), m.nrows(), m.ncols());
    for z in m.iter() {
        match scalar {
            Scalar::Real => writeln!(out, "{:.16e}", z.re),
            Scalar::Complex => writeln!(out, "{:.16e} {:.16e}", z.re, z.im),
        }
        .expect("writing to String");
    }
    out
}

pub fn parse_mtx(text: &str) -> Result<CMat> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::MatrixMarket("empty file".into()))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::MatrixMarket(format!("bad header {header:?}")));
    }
    if words[4] != "general" {
        return Err(Error::MatrixMarket(format!("unsupported symmetry {:?}", words[4])));
    }
    let scalar = Scalar::parse(&words[3])?;
    let mut body = lines.map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('%'));
    let size = body.next().ok_or_else(|| Error::MatrixMarket("missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| Error::MatrixMarket(format!("bad size line {size:?}"))))
        .collect::<Result<_>>()?;
    let number = |t: &str| t.parse::<f64>().map_err(|_| Error::MatrixMarket(format!("bad number {t:?}")));
    match words[2].as_str() {
        "array" => {
            let [rows, cols] = dims[..] else {
                return Err(Error::MatrixMarket(format!("array size line needs 2 fields, got {size:?}")));
            };
            let mut data = Vec::with_capacity(rows * cols);
            for line in body {
                let f: Vec<&str> = line.split_whitespace().collect();
                data.push(match (scalar, f.len()) {
                    (Scalar::Real, 1) => C64::new(number(f[0])?, 0.0),
                    (Scalar::Complex, 2) => C64::new(number(f[0])?, number(f[1])?),
                    _ => return Err(Error::MatrixMarket(format!("bad entry line {line:?}"))),
                });
            }
            if data.len() != rows * cols {
                return Err(Error::MatrixMarket(format!("expected {} entries, found {}", rows * cols, data.len())));
            }
            Ok(CMat::from_vec(rows, cols, data))
        }
        "coordinate" => {
            let [rows, cols, nnz] = dims[..] else {
                return Err(Error::MatrixMarket(format!("coordinate size line needs 3 fields, got {size:?}")));
            };
            let mut m = CMat::zeros(rows, cols);
            let mut count = 0;
            for line in body {
                let f: Vec<&str> = line.split_whitespace().collect();
                let want = if scalar == Scalar::Real { 3 } else { 4 };
                if f.len() != want {
                    return Err(Error::MatrixMarket(format!("bad entry line {line:?}")));
                }
                let idx = |t: &str, bound: usize| match t.parse::<usize>() {
                    Ok(i) if (1..=bound).contains(&i) => Ok(i - 1),
                    _ => Err(Error::MatrixMarket(format!("index {t:?} out of range"))),
                };
                let (i, j) = (idx(f[0], rows)?, idx(f[1], cols)?);
                let im = if want == 4 { number(f[3])? } else { 0.0 };
                m[(i, j)] += C64::new(number(f[2])?, im);
                count += 1;
            }
            if count != nnz {
                return Err(Error::MatrixMarket(format!("expected {nnz} entries, found {count}")));
            }
            Ok(m)
        }
        other => Err(Error::MatrixMarket(format!("unsupported format {other:?}"))),
    }
}

pub fn write_mtx(path: impl AsRef<Path>, m: &CMat) -> Result<()> {
    fs::write(path, format_mtx(m, Scalar::of(m)))?;
    Ok(())
}

pub fn read_mtx(path: impl AsRef<Path>) -> Result<CMat> {
    parse_mtx(&fs::read_to_string(path)?)
}

pub fn write_bundle(dir: impl AsRef<Path>, f: &LowRankFactors) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let scalar = if [f.left(), f.middle(), f.right()].iter().all(|m| Scalar::of(m) == Scalar::Real) {
        Scalar::Real
    } else {
        Scalar::Complex
    };
    let manifest = format!("m={}\nn={}\nrank={}\nscalar={}\n", f.nrows(), f.ncols(), f.rank(), scalar.name());
    fs::write(dir.join("manifest.txt"), manifest)?;
    for (name, m) in [("left", f.left()), ("middle", f.middle()), ("right", f.right())] {
        fs::write(dir.join(format!("{name}.mtx")), format_mtx(m, scalar))?;
    }
    Ok(())
}

pub fn read_bundle(dir: impl AsRef<Path>) -> Result<LowRankFactors> {
    let dir = dir.as_ref();
    let text = fs::read_to_string(dir.join("manifest.txt"))?;
    let mut dims = [None; 3];
    for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::MatrixMarket(format!("bad manifest line {line:?}")))?;
        let slot = match key.trim() {
            "m" => 0,
            "n" => 1,
            "rank" => 2,
            "scalar" => {
                Scalar::parse(value.trim())?;
                continue;
            }
            _ => continue,
        };
        dims[slot] = Some(value.trim().parse::<usize>().map_err(|_| Error::MatrixMarket(format!("bad manifest value {line:?}")))?);
    }
    let [Some(m), Some(n), Some(rank)] = dims else {
        return Err(Error::MatrixMarket("manifest needs m, n and rank".into()));
    };
    let f = LowRankFactors::new(read_mtx(dir.join("left.mtx"))?, read_mtx(dir.join("middle.mtx"))?, read_mtx(dir.join("right.mtx"))?)?;
    if (f.nrows(), f.ncols(), f.rank()) != (m, n, rank) {
        return Err(Error::MatrixMarket(format!(
            "manifest says {m}x{n} rank {rank}, files give {}x{} rank {}",
            f.nrows(),
            f.ncols(),
            f.rank()
        )));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c64;

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let d = std::env::temp_dir().join(format!("fiadi-mtx-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        d
    }

    #[test]
    fn roundtrip_is_exact() {
        let m = CMat::from_fn(3, 4, |i, j| C64::new(1.0 / (i + j + 1) as f64, (i as f64 - j as f64) * f64::EPSILON.sqrt()));
        assert_eq!(parse_mtx(&format_mtx(&m, Scalar::Complex)).unwrap(), m);
        let r = m.map(|z| c64(z.re * 1e-300));
        assert_eq!(Scalar::of(&r), Scalar::Real);
        assert_eq!(parse_mtx(&format_mtx(&r, Scalar::Real)).unwrap(), r);
    }

    #[test]
    fn reads_coordinate_and_comments() {
        let text = "%%MatrixMarket matrix coordinate real general\n% comment\n2 3 2\n1 1 1.5\n2 3 -2\n";
        let m = parse_mtx(text).unwrap();
        assert_eq!(m[(0, 0)], c64(1.5));
        assert_eq!(m[(1, 2)], c64(-2.0));
        assert_eq!(m.iter().filter(|z| z.norm() != 0.0).count(), 2);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "",
            "%%MatrixMarket matrix array real symmetric\n1 1\n1\n",
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n",
            "%%MatrixMarket matrix array complex general\n1 1\n1\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1\n",
            "%%MatrixMarket matrix array real general\n1 1\nabc\n",
        ] {
            assert!(matches!(parse_mtx(bad), Err(Error::MatrixMarket(_))), "{bad:?}");
        }
    }

    #[test]
    fn bundle_roundtrip() {
        let dir = tmpdir("bundle");
        let f = LowRankFactors::from_diagonal(
            CMat::from_fn(5, 2, |i, j| C64::new(i as f64, j as f64)),
            &[c64(2.0), C64::new(0.0, -1.0)],
            CMat::from_fn(4, 2, |i, j| c64((i * j) as f64 + 0.1)),
        )
        .unwrap();
        write_bundle(&dir, &f).unwrap();
        let manifest = fs::read_to_string(dir.join("manifest.txt")).unwrap();
        assert!(manifest.contains("rank=2") && manifest.contains("scalar=complex"));
        let g = read_bundle(&dir).unwrap();
        assert_eq!(g.left(), f.left());
        assert_eq!(g.middle(), f.middle());
        assert_eq!(g.right(), f.right());

        fs::write(dir.join("manifest.txt"), "m=5\nn=4\nrank=3\nscalar=complex\n").unwrap();
        assert!(read_bundle(&dir).is_err());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn zero_rank_bundle() {
        let dir = tmpdir("zero");
        write_bundle(&dir, &LowRankFactors::zero(3, 2)).unwrap();
        let g = read_bundle(&dir).unwrap();
        assert_eq!((g.nrows(), g.ncols(), g.rank()), (3, 2, 0));
        fs::remove_dir_all(&dir).unwrap();
    }
}
