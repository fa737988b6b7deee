//! Cycle-record CSV: header `idle,n_extra_arrivals,busy,delta_integral,aoi_integral,length`,
//! one row per cycle, floats in shortest round-trip decimal.

use pushout_aoi_core::CycleRecord;
use std::io::{Read, Write};

pub const HEADER: &str = "idle,n_extra_arrivals,busy,delta_integral,aoi_integral,length";

/// Appends records after a header row.
pub fn write_records<W: Write>(out: W, records: &[CycleRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(input: R) -> csv::Result<Vec<CycleRecord>> {
    csv::Reader::from_reader(input).deserialize().collect()
}
