//! Text snapshots of curves and frozen registries.
//!
//! A snapshot is a header of `# key value` lines followed by one `x y` line
//! per vertex, all reals at 17 significant digits. Per-edge records that the
//! header does not carry (run, level, registry parent) go to a companion
//! `.edges` file; without it a snapshot still loads, as a single-run curve.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::{normal_angle_of, AngleRecord, Frame, FrameStep, Point};
use crate::refine::{ChordRun, EdgeInfo, FrozenRegistry, GenerationCurve, RegistryEntry};
use crate::snowflake::Coding;

/// 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>().map_err(|_| Error::Parse {
        line,
        msg: format!("not a number: {s:?}"),
    })
}

fn parse_int<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse::<T>().map_err(|_| Error::Parse {
        line,
        msg: format!("not an integer: {s:?}"),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub curve: GenerationCurve,
    /// Index of the tracked horizontal chord, if any.
    pub lineage: Option<usize>,
}

pub fn edges_path(path: &Path) -> PathBuf {
    path.with_extension("edges")
}

pub fn snapshot_text(curve: &GenerationCurve, lineage: Option<usize>) -> String {
    let mut s = String::with_capacity(48 * curve.len() + 256);
    let _ = writeln!(s, "# generation {}", curve.generation);
    let _ = writeln!(s, "# chord_length {}", real(curve.chord_length));
    let frozen: Vec<String> = curve.frozen_edges().iter().map(|i| i.to_string()).collect();
    let _ = writeln!(s, "# frozen {}", frozen.join(","));
    for st in &curve.frame.steps {
        let _ = writeln!(s, "# frame {} {} {}", st.log2_scale, real(st.origin.x), real(st.origin.y));
    }
    for r in &curve.runs {
        let _ = writeln!(s, "# run {} {}", r.level, real(r.chord_length));
    }
    if let Some(k) = lineage {
        let _ = writeln!(s, "# lineage {k}");
    }
    for p in curve.vertices() {
        let _ = writeln!(s, "{} {}", real(p.x), real(p.y));
    }
    s
}

pub fn edges_text(curve: &GenerationCurve) -> String {
    let mut s = String::with_capacity(16 * curve.len());
    let opt = |o: Option<u32>| o.map_or("-".to_string(), |v| v.to_string());
    for e in &curve.edges {
        let _ = writeln!(s, "{} {} {} {}", opt(e.run), e.level, e.partial as u8, opt(e.parent));
    }
    s
}

/// Writes the snapshot and its `.edges` companion.
pub fn save_snapshot(path: &Path, curve: &GenerationCurve, lineage: Option<usize>) -> Result<()> {
    fs::write(path, snapshot_text(curve, lineage))?;
    fs::write(edges_path(path), edges_text(curve))?;
    Ok(())
}

pub fn load_snapshot(path: &Path) -> Result<Snapshot> {
    let text = fs::read_to_string(path)?;
    let edges = match fs::read_to_string(edges_path(path)) {
        Ok(t) => Some(t),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(e) => return Err(e.into()),
    };
    parse_snapshot(&text, edges.as_deref())
}

pub fn parse_snapshot(text: &str, edges: Option<&str>) -> Result<Snapshot> {
    let mut generation = None;
    let mut chord_length = None;
    let mut frozen: Vec<usize> = Vec::new();
    let mut frame = Frame::identity();
    let mut runs = Vec::new();
    let mut lineage = None;
    let mut vertices = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(h) = line.strip_prefix('#') {
            let mut it = h.split_whitespace();
            let key = it.next().unwrap_or("");
            let rest: Vec<&str> = it.collect();
            match (key, rest.as_slice()) {
                ("generation", [g]) => generation = Some(parse_int::<u32>(g, ln)?),
                ("chord_length", [l]) => chord_length = Some(parse_real(l, ln)?),
                ("frozen", []) => {}
                ("frozen", [list]) => {
                    frozen = list.split(',').map(|t| parse_int(t, ln)).collect::<Result<_>>()?;
                }
                ("frame", [k, x, y]) => {
                    frame = frame.then(FrameStep {
                        log2_scale: parse_int(k, ln)?,
                        origin: Point::new(parse_real(x, ln)?, parse_real(y, ln)?),
                    })
                }
                ("run", [lv, l]) => runs.push(ChordRun {
                    level: parse_int(lv, ln)?,
                    chord_length: parse_real(l, ln)?,
                }),
                ("lineage", [k]) => lineage = Some(parse_int(k, ln)?),
                _ => {
                    return Err(Error::Parse {
                        line: ln,
                        msg: format!("unknown header {line:?}"),
                    })
                }
            }
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(x), Some(y), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse {
                line: ln,
                msg: format!("expected \"x y\", got {line:?}"),
            });
        };
        vertices.push(Point::new(parse_real(x, ln)?, parse_real(y, ln)?));
    }
    let missing = |what: &str| Error::Parse {
        line: 0,
        msg: format!("missing header {what}"),
    };
    let generation = generation.ok_or_else(|| missing("generation"))?;
    let chord_length = chord_length.ok_or_else(|| missing("chord_length"))?;
    let n = vertices.len();
    if n < 3 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{n} vertices, need at least 3"),
        });
    }
    if runs.is_empty() {
        runs.push(ChordRun {
            level: generation,
            chord_length,
        });
    }
    let mut is_frozen = vec![false; n];
    for &f in &frozen {
        *is_frozen.get_mut(f).ok_or_else(|| Error::Parse {
            line: 0,
            msg: format!("frozen edge {f} out of range"),
        })? = true;
    }
    let mut info = Vec::with_capacity(n);
    let records: Vec<&str> = edges.map(|t| t.lines().filter(|l| !l.trim().is_empty()).collect()).unwrap_or_default();
    if edges.is_some() && records.len() != n {
        return Err(Error::Parse {
            line: 0,
            msg: format!("{} edge records for {n} vertices", records.len()),
        });
    }
    for i in 0..n {
        let d = vertices[(i + 1) % n] - vertices[i];
        let normal = if is_frozen[i] {
            AngleRecord::east()
        } else {
            normal_angle_of(d).map_err(|e| Error::Parse {
                line: 0,
                msg: format!("edge {i}: {e}"),
            })?
        };
        let mut e = EdgeInfo::plain(normal, generation, 0);
        e.frozen = is_frozen[i];
        if let Some(r) = records.get(i) {
            let f: Vec<&str> = r.split_whitespace().collect();
            let [run, level, partial, parent] = f[..] else {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("edge record {r:?}"),
                });
            };
            let opt = |s: &str| -> Result<Option<u32>> {
                if s == "-" {
                    Ok(None)
                } else {
                    parse_int(s, i + 1).map(Some)
                }
            };
            e.run = opt(run)?;
            e.level = parse_int(level, i + 1)?;
            e.partial = partial == "1";
            e.parent = opt(parent)?;
        }
        info.push(e);
    }
    let curve = GenerationCurve::new(generation, frame, vertices, info, chord_length, runs)?;
    Ok(Snapshot { curve, lineage })
}

pub fn registry_text(registry: &FrozenRegistry, frame: &Frame) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# registry {}", registry.len());
    for st in &frame.steps {
        let _ = writeln!(s, "# frame {} {} {}", st.log2_scale, real(st.origin.x), real(st.origin.y));
    }
    for e in &registry.entries {
        let digits: String = e.coding.digits().iter().map(|d| char::from(b'0' + d)).collect();
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {}",
            e.generation,
            real(e.a.x),
            real(e.a.y),
            real(e.b.x),
            real(e.b.y),
            if digits.is_empty() { "-".into() } else { digits },
            e.source_edge
        );
    }
    s
}

pub fn save_registry(path: &Path, registry: &FrozenRegistry, frame: &Frame) -> Result<()> {
    fs::write(path, registry_text(registry, frame))?;
    Ok(())
}

pub fn load_registry(path: &Path) -> Result<(FrozenRegistry, Frame)> {
    parse_registry(&fs::read_to_string(path)?)
}

pub fn parse_registry(text: &str) -> Result<(FrozenRegistry, Frame)> {
    let mut reg = FrozenRegistry::new();
    let mut frame = Frame::identity();
    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with("# registry") {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match f[..] {
            ["#", "frame", k, x, y] => {
                frame = frame.then(FrameStep {
                    log2_scale: parse_int(k, ln)?,
                    origin: Point::new(parse_real(x, ln)?, parse_real(y, ln)?),
                })
            }
            [g, ax, ay, bx, by, coding, src] => {
                let digits = if coding == "-" {
                    Vec::new()
                } else {
                    coding
                        .bytes()
                        .map(|b| match b {
                            b'1'..=b'4' => Ok(b - b'0'),
                            _ => Err(Error::Parse {
                                line: ln,
                                msg: format!("bad coding {coding:?}"),
                            }),
                        })
                        .collect::<Result<Vec<u8>>>()?
                };
                reg.entries.push(RegistryEntry {
                    generation: parse_int(g, ln)?,
                    a: Point::new(parse_real(ax, ln)?, parse_real(ay, ln)?),
                    b: Point::new(parse_real(bx, ln)?, parse_real(by, ln)?),
                    coding: Coding::from_digits(&digits),
                    source_edge: parse_int(src, ln)?,
                });
            }
            _ => {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("bad registry line {line:?}"),
                })
            }
        }
    }
    Ok((reg, frame))
}
