//! Snapshot files: node states and edges of one network at one time step.
//!
//! ```text
//! # geocascade snapshot
//! # t: 80
//! id,x,y,active
//! 0,512.25,33.5,1
//! ...
//! u,v,kind,length
//! 0,17,local,9.75
//! 3,4410,long,388.1
//! ```

use std::io::{self, BufRead, Write};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::graph::{LongLink, Network};
use crate::VERSION;

pub const NODE_HEADER: &str = "id,x,y,active";
pub const EDGE_HEADER: &str = "u,v,kind,length";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Local,
    Long,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotEdge {
    pub u: usize,
    pub v: usize,
    pub kind: EdgeKind,
    pub length: f64,
}

/// Contents of a snapshot file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Snapshot {
    pub t: Option<usize>,
    pub positions: Vec<Point>,
    pub active: Vec<bool>,
    pub edges: Vec<SnapshotEdge>,
}

/// Writes node states and every local and long-range edge.
pub fn export_snapshot<W: Write + ?Sized>(net: &Network, active: &[bool], t: usize, w: &mut W) -> Result<()> {
    if active.len() != net.node_count() {
        return Err(Error::invalid(
            "state",
            format!("{} node states for a {}-node network", active.len(), net.node_count()),
        ));
    }
    writeln!(w, "# geocascade {VERSION} snapshot")?;
    writeln!(w, "# t: {t}")?;
    writeln!(w, "# L: {}", net.side())?;
    writeln!(w, "# boundary: {}", net.boundary())?;
    writeln!(w, "# R: {}", net.range())?;
    writeln!(w, "{NODE_HEADER}")?;
    for (i, (p, &a)) in net.positions().iter().zip(active).enumerate() {
        writeln!(w, "{i},{},{},{}", p.x, p.y, u8::from(a))?;
    }
    writeln!(w, "{EDGE_HEADER}")?;
    for (u, v) in net.local_edges() {
        writeln!(w, "{u},{v},local,{}", net.distance(u, v))?;
    }
    for l in net.long_links() {
        writeln!(w, "{},{},long,{}", l.u, l.v, l.length)?;
    }
    Ok(())
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        key: "snapshot".into(),
        line,
        message: msg.into(),
    }
}

/// Reads a file written by [`export_snapshot`].
pub fn parse_snapshot<R: BufRead>(r: R) -> Result<Snapshot> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Nodes,
        Edges,
    }
    let mut snap = Snapshot::default();
    let mut section = Section::Preamble;
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            if let Some(t) = meta.trim().strip_prefix("t:") {
                snap.t = Some(t.trim().parse().map_err(|_| bad(no, "bad time step"))?);
            }
            continue;
        }
        match line {
            NODE_HEADER => {
                section = Section::Nodes;
                continue;
            }
            EDGE_HEADER => {
                section = Section::Edges;
                continue;
            }
            _ => {}
        }
        let f: Vec<&str> = line.split(',').collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(no, format!("bad number `{s}`")));
        let id = |s: &str| s.parse::<usize>().map_err(|_| bad(no, format!("bad node id `{s}`")));
        match section {
            Section::Preamble => return Err(bad(no, "data before a section header")),
            Section::Nodes => {
                if f.len() != 4 {
                    return Err(bad(no, "node rows have 4 fields"));
                }
                if id(f[0])? != snap.positions.len() {
                    return Err(bad(no, "node ids must be consecutive from 0"));
                }
                snap.positions.push(Point::new(num(f[1])?, num(f[2])?));
                snap.active.push(match f[3] {
                    "1" => true,
                    "0" => false,
                    other => return Err(bad(no, format!("active must be 0 or 1, got `{other}`"))),
                });
            }
            Section::Edges => {
                if f.len() != 4 {
                    return Err(bad(no, "edge rows have 4 fields"));
                }
                let kind = match f[2] {
                    "local" => EdgeKind::Local,
                    "long" => EdgeKind::Long,
                    other => return Err(bad(no, format!("unknown edge kind `{other}`"))),
                };
                snap.edges.push(SnapshotEdge {
                    u: id(f[0])?,
                    v: id(f[1])?,
                    kind,
                    length: num(f[3])?,
                });
            }
        }
    }
    Ok(snap)
}

impl Snapshot {
    pub fn local_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().filter(|e| e.kind == EdgeKind::Local).map(|e| (e.u, e.v))
    }

    pub fn long_links(&self) -> impl Iterator<Item = LongLink> + '_ {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Long)
            .map(|e| LongLink { u: e.u, v: e.v, length: e.length })
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }
}

/// Convenience for writing a snapshot of `net` to `path`.
pub fn export_snapshot_file(net: &Network, active: &[bool], t: usize, path: &std::path::Path) -> Result<()> {
    let mut w = io::BufWriter::new(std::fs::File::create(path)?);
    export_snapshot(net, active, t, &mut w)?;
    w.flush()?;
    Ok(())
}
