//! Text file formats: T3v1 tensors and trajectory-archive manifests.
//!
//! T3v1 layout: a header line `t3 n m r`, then r slice blocks, each n
//! lines of m whitespace-separated decimals, printed with 17 significant
//! digits so 64-bit floats round-trip exactly. A blank line separates
//! slices, `#` starts a comment line, and readers accept both `\n` and
//! `\r\n` endings.
//!
//! A trajectory archive is a directory of T3v1 files plus `manifest.txt`
//! recording the generation mode, dimensions, seed, and the ordered file
//! list.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Result, TpdsError};
use crate::tensor3::Tensor3;

fn parse_err(path: &str, line: usize, msg: impl Into<String>) -> TpdsError {
    TpdsError::Parse {
        path: path.to_string(),
        line,
        msg: msg.into(),
    }
}

// io::Error carries no path; label it so `--x0 nope.t3` names the culprit
fn io_err(path: &Path, e: std::io::Error) -> TpdsError {
    TpdsError::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

// ---------------------------------------------------------------------------
// T3v1 tensors
// ---------------------------------------------------------------------------

/// Render a tensor in T3v1 form.
pub fn tensor_to_string(t: &Tensor3) -> String {
    let (n, m, r) = t.dims();
    let mut out = String::new();
    let _ = writeln!(out, "t3 {n} {m} {r}");
    for k in 0..r {
        if k > 0 {
            out.push('\n');
        }
        for i in 0..n {
            for j in 0..m {
                if j > 0 {
                    out.push(' ');
                }
                // 17 significant digits: exact round-trip for f64
                let _ = write!(out, "{:.16e}", t.get(i, j, k));
            }
            out.push('\n');
        }
    }
    out
}

/// Parse T3v1 text; `path` labels diagnostics only.
pub fn parse_tensor(text: &str, path: &str) -> Result<Tensor3> {
    // (line number, payload) with comments, blanks, and \r endings removed
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(idx, raw)| (idx + 1, raw.strip_suffix('\r').unwrap_or(raw).trim()))
        .filter(|(_, s)| !s.is_empty() && !s.starts_with('#'));

    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, "empty file, expected `t3 n m r` header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "t3" {
        return Err(parse_err(
            path,
            hline,
            format!("expected `t3 n m r` header, found `{header}`"),
        ));
    }
    let dim = |s: &str, name: &str| -> Result<usize> {
        s.parse::<usize>()
            .map_err(|_| parse_err(path, hline, format!("invalid {name} `{s}` in header")))
    };
    let n = dim(fields[1], "n")?;
    let m = dim(fields[2], "m")?;
    let r = dim(fields[3], "r")?;

    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n * r);
    let mut last_line = hline;
    for (lineno, body) in lines {
        if rows.len() == n * r {
            return Err(parse_err(
                path,
                lineno,
                format!("unexpected content after {} data lines", n * r),
            ));
        }
        let mut row = Vec::with_capacity(m);
        for tok in body.split_whitespace() {
            let v: f64 = tok
                .parse()
                .map_err(|_| parse_err(path, lineno, format!("invalid number `{tok}`")))?;
            row.push(v);
        }
        if row.len() != m {
            return Err(parse_err(
                path,
                lineno,
                format!("expected {m} values on a data line, found {}", row.len()),
            ));
        }
        rows.push(row);
        last_line = lineno;
    }
    if rows.len() != n * r {
        return Err(parse_err(
            path,
            last_line,
            format!(
                "truncated tensor body: found {} of {} data lines",
                rows.len(),
                n * r
            ),
        ));
    }
    Ok(Tensor3::from_fn(n, m, r, |i, j, k| rows[k * n + i][j]))
}

/// Write a tensor file in T3v1 form.
pub fn write_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, tensor_to_string(t)).map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Read a T3v1 tensor file.
pub fn read_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_tensor(&text, &path.display().to_string())
}

// ---------------------------------------------------------------------------
// trajectory-archive manifests
// ---------------------------------------------------------------------------

/// Contents of a `manifest.txt`: how an archive was generated and which
/// files belong to it, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    /// `random` (data tensors drawn directly) or `simulate` (trajectory
    /// of a generated system).
    pub mode: String,
    pub n: usize,
    pub h: usize,
    pub l: usize,
    pub r: usize,
    pub seed: u64,
    /// Ordered list of T3v1 files in the archive.
    pub files: Vec<String>,
}

impl Manifest {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode={}", self.mode);
        let _ = writeln!(out, "n={}", self.n);
        let _ = writeln!(out, "h={}", self.h);
        let _ = writeln!(out, "l={}", self.l);
        let _ = writeln!(out, "r={}", self.r);
        let _ = writeln!(out, "seed={}", self.seed);
        for f in &self.files {
            let _ = writeln!(out, "file={f}");
        }
        out
    }
}

/// Parse manifest text; `path` labels diagnostics only.
pub fn parse_manifest(text: &str, path: &str) -> Result<Manifest> {
    let mut mode: Option<String> = None;
    let mut dims: [Option<usize>; 4] = [None; 4];
    let mut seed: Option<u64> = None;
    let mut files = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw).trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(path, lineno, format!("expected key=value, found `{line}`")))?;
        let value = value.trim();
        let parse_usize = |v: &str, name: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| parse_err(path, lineno, format!("invalid {name} `{v}`")))
        };
        match key.trim() {
            "mode" => {
                if value != "random" && value != "simulate" {
                    return Err(parse_err(
                        path,
                        lineno,
                        format!("mode must be `random` or `simulate`, found `{value}`"),
                    ));
                }
                mode = Some(value.to_string());
            }
            "n" => dims[0] = Some(parse_usize(value, "n")?),
            "h" => dims[1] = Some(parse_usize(value, "h")?),
            "l" => dims[2] = Some(parse_usize(value, "l")?),
            "r" => dims[3] = Some(parse_usize(value, "r")?),
            "seed" => {
                seed = Some(value.parse().map_err(|_| {
                    parse_err(path, lineno, format!("invalid seed `{value}`"))
                })?)
            }
            "file" => files.push(value.to_string()),
            other => {
                return Err(parse_err(
                    path,
                    lineno,
                    format!("unknown manifest key `{other}`"),
                ))
            }
        }
    }

    let missing = |what: &str| parse_err(path, 1, format!("missing `{what}` entry"));
    Ok(Manifest {
        mode: mode.ok_or_else(|| missing("mode"))?,
        n: dims[0].ok_or_else(|| missing("n"))?,
        h: dims[1].ok_or_else(|| missing("h"))?,
        l: dims[2].ok_or_else(|| missing("l"))?,
        r: dims[3].ok_or_else(|| missing("r"))?,
        seed: seed.ok_or_else(|| missing("seed"))?,
        files,
    })
}

pub fn write_manifest(path: impl AsRef<Path>, m: &Manifest) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, m.to_text()).map_err(|e| io_err(path, e))?;
    Ok(())
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    parse_manifest(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::{random_tensor, Dist};

    fn scratch_dir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "tpds-io-{tag}-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn bits(t: &Tensor3) -> Vec<u64> {
        t.data().iter().map(|v| v.to_bits()).collect()
    }

    #[test]
    fn tensor_round_trip_is_bitwise_exact() {
        for seed in 0..20u64 {
            let t = random_tensor(3, 4, 5, seed, Dist::StandardNormal).scale(1e-7);
            let back = parse_tensor(&tensor_to_string(&t), "mem").unwrap();
            assert_eq!(back.dims(), t.dims());
            assert_eq!(bits(&back), bits(&t), "seed {seed}");
        }
        // extreme magnitudes and signed zero survive
        let mut t = Tensor3::zeros(2, 2, 1);
        t.set(0, 0, 0, 1.0e-300);
        t.set(0, 1, 0, -9.87e300);
        t.set(1, 0, 0, -0.0);
        t.set(1, 1, 0, std::f64::consts::PI);
        let back = parse_tensor(&tensor_to_string(&t), "mem").unwrap();
        assert_eq!(bits(&back), bits(&t));
    }

    #[test]
    fn file_round_trip() {
        let dir = scratch_dir("rt");
        let t = random_tensor(2, 3, 4, 7, Dist::Uniform);
        let path = dir.join("x.t3");
        write_tensor(&path, &t).unwrap();
        let back = read_tensor(&path).unwrap();
        assert_eq!(bits(&back), bits(&t));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn reader_accepts_comments_crlf_and_packed_layout() {
        // no blank lines between slices, comments interleaved, \r\n endings
        let text = "# leading comment\r\nt3 2 2 2\r\n1 2\r\n3 4\r\n# slice two\r\n5 6\r\n7 8\r\n";
        let t = parse_tensor(text, "mem").unwrap();
        assert_eq!(t.dims(), (2, 2, 2));
        assert_eq!(t.get(0, 1, 0), 2.0);
        assert_eq!(t.get(1, 0, 1), 7.0);
    }

    #[test]
    fn parse_failures_carry_line_diagnostics() {
        let cases = [
            ("", 1, "empty"),
            ("t4 2 2 1\n1 2\n3 4\n", 1, "header"),
            ("t3 2 x 1\n1 2\n3 4\n", 1, "invalid m"),
            ("t3 2 2 1\n1 2\n3\n", 3, "expected 2 values"),
            ("t3 2 2 1\n1 2\n3 oops\n", 3, "invalid number"),
            ("t3 2 2 1\n1 2\n", 2, "truncated"),
            ("t3 2 2 1\n1 2\n3 4\n5 6\n", 4, "unexpected content"),
        ];
        for (text, want_line, tag) in cases {
            match parse_tensor(text, "mem") {
                Err(TpdsError::Parse { line, .. }) => {
                    assert_eq!(line, want_line, "case `{tag}`")
                }
                other => panic!("case `{tag}`: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn manifest_round_trip_preserves_file_order() {
        let m = Manifest {
            mode: "simulate".into(),
            n: 2,
            h: 2,
            l: 10,
            r: 4,
            seed: 99,
            files: vec!["x0.t3".into(), "x1.t3".into(), "a.t3".into()],
        };
        let back = parse_manifest(&m.to_text(), "mem").unwrap();
        assert_eq!(back, m);

        let dir = scratch_dir("mf");
        let path = dir.join("manifest.txt");
        write_manifest(&path, &m).unwrap();
        assert_eq!(read_manifest(&path).unwrap(), m);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn manifest_rejects_bad_entries() {
        let bad_mode = "mode=banana\nn=2\nh=2\nl=10\nr=4\nseed=1\n";
        assert!(matches!(
            parse_manifest(bad_mode, "mem"),
            Err(TpdsError::Parse { line: 1, .. })
        ));
        let unknown = "mode=random\nn=2\nh=2\nl=10\nr=4\nseed=1\nbogus=3\n";
        assert!(matches!(
            parse_manifest(unknown, "mem"),
            Err(TpdsError::Parse { line: 7, .. })
        ));
        let missing = "mode=random\nn=2\nh=2\nl=10\nseed=1\n";
        match parse_manifest(missing, "mem") {
            Err(TpdsError::Parse { msg, .. }) => assert!(msg.contains("`r`"), "{msg}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
