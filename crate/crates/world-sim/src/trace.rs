//! Trace ingestion and export.
//!
//! Trace CSV, one row per entity per slot:
//! `slot,entity_kind,entity_id,x_m,y_m,heading_rad,length_m,width_m,is_cov,is_ego`
//! with `entity_kind` in {car, ped} and booleans as 0/1. Buildings live in
//! a separate CSV with rows `x_min,y_min,x_max,y_max`. Distances are
//! meters, angles radians, one header row, UTF-8.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use crate::frame::{FrameError, Pedestrian, VehicleState, WorldFrame};
use crate::geom::{Rect, Vec2};

pub const TRACE_HEADER: &str =
    "slot,entity_kind,entity_id,x_m,y_m,heading_rad,length_m,width_m,is_cov,is_ego";
pub const BUILDINGS_HEADER: &str = "x_min,y_min,x_max,y_max";

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("trace is empty")]
    Empty,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> TraceError {
    TraceError::Parse {
        path: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

/// Streaming trace writer.
pub struct TraceWriter<W: Write> {
    w: W,
}

impl TraceWriter<BufWriter<File>> {
    pub fn create(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        let file = File::create(path)?;
        Self::new(BufWriter::new(file))
    }
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut w: W) -> Result<Self, TraceError> {
        writeln!(w, "{}", TRACE_HEADER)?;
        Ok(Self { w })
    }

    pub fn write_frame(&mut self, frame: &WorldFrame) -> Result<(), TraceError> {
        for v in &frame.vehicles {
            writeln!(
                self.w,
                "{},car,{},{},{},{},{},{},{},{}",
                frame.slot,
                v.id,
                v.center.x,
                v.center.y,
                v.heading,
                v.length_m,
                v.width_m,
                v.is_cov as u8,
                v.is_ego as u8
            )?;
        }
        for p in &frame.pedestrians {
            writeln!(
                self.w,
                "{},ped,{},{},{},0,0,0,0,0",
                frame.slot, p.id, p.pos.x, p.pos.y
            )?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), TraceError> {
        self.w.flush()?;
        Ok(())
    }
}

pub fn save_trace<'a>(
    path: impl AsRef<Path>,
    frames: impl IntoIterator<Item = &'a WorldFrame>,
) -> Result<(), TraceError> {
    let mut writer = TraceWriter::create(path)?;
    for frame in frames {
        writer.write_frame(frame)?;
    }
    writer.finish()
}

pub fn save_buildings(path: impl AsRef<Path>, buildings: &[Rect]) -> Result<(), TraceError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", BUILDINGS_HEADER)?;
    for b in buildings {
        writeln!(w, "{},{},{},{}", b.min.x, b.min.y, b.max.x, b.max.y)?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_buildings(path: impl AsRef<Path>) -> Result<Vec<Rect>, TraceError> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut buildings = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line.trim() != BUILDINGS_HEADER {
                return Err(parse_err(path, 1, "missing buildings header"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(parse_err(path, idx + 1, "expected 4 fields"));
        }
        let mut vals = [0.0f64; 4];
        for (i, f) in fields.iter().enumerate() {
            vals[i] = f
                .parse()
                .map_err(|_| parse_err(path, idx + 1, format!("bad number {f:?}")))?;
        }
        buildings.push(Rect::new(vals[0], vals[1], vals[2], vals[3]));
    }
    Ok(buildings)
}

/// Loads a trace and validates every frame; slots must be contiguous and
/// ascending.
pub fn load_trace(
    trace_path: impl AsRef<Path>,
    buildings_path: impl AsRef<Path>,
) -> Result<Vec<WorldFrame>, TraceError> {
    let buildings = Arc::new(load_buildings(buildings_path)?);
    let path = trace_path.as_ref();
    let reader = BufReader::new(File::open(path)?);

    let mut frames: Vec<WorldFrame> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if idx == 0 {
            if line.trim() != TRACE_HEADER {
                return Err(parse_err(path, 1, "missing trace header"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(parse_err(path, idx + 1, format!("expected 10 fields, got {}", f.len())));
        }
        let slot: u64 = f[0]
            .parse()
            .map_err(|_| parse_err(path, idx + 1, format!("bad slot {:?}", f[0])))?;
        let id: u64 = f[2]
            .parse()
            .map_err(|_| parse_err(path, idx + 1, format!("bad entity id {:?}", f[2])))?;
        let num = |i: usize| -> Result<f64, TraceError> {
            f[i].parse()
                .map_err(|_| parse_err(path, idx + 1, format!("bad number {:?}", f[i])))
        };
        let flag = |i: usize| -> Result<bool, TraceError> {
            match f[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(parse_err(path, idx + 1, format!("bad flag {other:?}"))),
            }
        };

        match frames.last() {
            Some(last) if last.slot == slot => {}
            Some(last) if last.slot + 1 == slot => frames.push(WorldFrame {
                slot,
                vehicles: Vec::new(),
                pedestrians: Vec::new(),
                buildings: Arc::clone(&buildings),
            }),
            Some(last) => {
                return Err(parse_err(
                    path,
                    idx + 1,
                    format!("non-contiguous slot {} after {}", slot, last.slot),
                ))
            }
            None => frames.push(WorldFrame {
                slot,
                vehicles: Vec::new(),
                pedestrians: Vec::new(),
                buildings: Arc::clone(&buildings),
            }),
        }
        let frame = frames.last_mut().expect("frame exists");

        match f[1] {
            "car" => frame.vehicles.push(VehicleState {
                id,
                center: Vec2::new(num(3)?, num(4)?),
                heading: num(5)?,
                length_m: num(6)?,
                width_m: num(7)?,
                is_cov: flag(8)?,
                is_ego: flag(9)?,
            }),
            "ped" => frame.pedestrians.push(Pedestrian {
                id,
                pos: Vec2::new(num(3)?, num(4)?),
            }),
            other => return Err(parse_err(path, idx + 1, format!("bad entity kind {other:?}"))),
        }
    }

    if frames.is_empty() {
        return Err(TraceError::Empty);
    }
    for frame in &frames {
        frame.validate()?;
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mobility::{ManhattanConfig, ManhattanTrace};

    fn tiny_trace() -> (Vec<WorldFrame>, Vec<Rect>) {
        let cfg = ManhattanConfig {
            n_cars: 12,
            cov_ratio: 0.5,
            t_slots: 3,
            seed: 2,
            ..ManhattanConfig::default()
        };
        let gen = ManhattanTrace::new(cfg).unwrap();
        let buildings = gen.buildings();
        let frames: Vec<WorldFrame> = gen.collect();
        (frames, buildings.to_vec())
    }

    #[test]
    fn round_trip_reproduces_frames() {
        let (frames, buildings) = tiny_trace();
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("trace.csv");
        let bpath = dir.path().join("buildings.csv");
        save_trace(&tpath, &frames).unwrap();
        save_buildings(&bpath, &buildings).unwrap();
        let loaded = load_trace(&tpath, &bpath).unwrap();
        assert_eq!(frames, loaded);
    }

    #[test]
    fn well_formed_three_frames() {
        let (frames, _) = tiny_trace();
        assert_eq!(frames.len(), 3);
        assert_eq!(frames[0].slot, 1);
        assert_eq!(frames[2].slot, 3);
    }

    #[test]
    fn duplicate_vehicle_id_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("trace.csv");
        let bpath = dir.path().join("buildings.csv");
        std::fs::write(
            &tpath,
            format!(
                "{}\n1,car,0,1,1,0,4.5,1.8,1,1\n1,car,0,9,9,0,4.5,1.8,0,0\n",
                TRACE_HEADER
            ),
        )
        .unwrap();
        std::fs::write(&bpath, format!("{}\n", BUILDINGS_HEADER)).unwrap();
        let err = load_trace(&tpath, &bpath).unwrap_err();
        assert!(matches!(err, TraceError::Frame(FrameError::DuplicateId { .. })));
    }

    #[test]
    fn missing_ego_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("trace.csv");
        let bpath = dir.path().join("buildings.csv");
        std::fs::write(
            &tpath,
            format!("{}\n1,car,0,1,1,0,4.5,1.8,1,0\n", TRACE_HEADER),
        )
        .unwrap();
        std::fs::write(&bpath, format!("{}\n", BUILDINGS_HEADER)).unwrap();
        let err = load_trace(&tpath, &bpath).unwrap_err();
        assert!(matches!(err, TraceError::Frame(FrameError::EgoCount { .. })));
    }

    #[test]
    fn non_contiguous_slots_rejected_with_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("trace.csv");
        let bpath = dir.path().join("buildings.csv");
        std::fs::write(
            &tpath,
            format!(
                "{}\n1,car,0,1,1,0,4.5,1.8,1,1\n3,car,0,2,1,0,4.5,1.8,1,1\n",
                TRACE_HEADER
            ),
        )
        .unwrap();
        std::fs::write(&bpath, format!("{}\n", BUILDINGS_HEADER)).unwrap();
        match load_trace(&tpath, &bpath).unwrap_err() {
            TraceError::Parse { line, msg, .. } => {
                assert_eq!(line, 3);
                assert!(msg.contains("non-contiguous"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_row_reports_line() {
        let dir = tempfile::tempdir().unwrap();
        let tpath = dir.path().join("trace.csv");
        let bpath = dir.path().join("buildings.csv");
        std::fs::write(
            &tpath,
            format!("{}\n1,car,0,abc,1,0,4.5,1.8,1,1\n", TRACE_HEADER),
        )
        .unwrap();
        std::fs::write(&bpath, format!("{}\n", BUILDINGS_HEADER)).unwrap();
        match load_trace(&tpath, &bpath).unwrap_err() {
            TraceError::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }
}
