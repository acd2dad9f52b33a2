//! Deterministic workloads shared by the benchmarks.

use metasheet_core::fixtures;
use metasheet_core::{
    resolve_template, serialize_delimited, write_workbook, ResolvedTemplate, Separator, Table, TermClient,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// A populated table for one bundled template, in every input format.
pub struct Workload {
    pub template: ResolvedTemplate,
    pub table: Table,
    pub xlsx: Vec<u8>,
    pub tsv: String,
}

pub fn resolved(id: &str) -> ResolvedTemplate {
    let template = fixtures::template(id).unwrap_or_else(|| panic!("no bundled template '{id}'"));
    resolve_template(&template, &TermClient::builtin()).expect("bundled value sets resolve")
}

/// `records` synthetic records for template `id`. Roughly one cell in
/// `fault_every` is misspelled; `0` leaves the table clean.
pub fn workload(id: &str, records: usize, fault_every: usize, seed: u64) -> Workload {
    let template = resolved(id);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut table = fixtures::synthetic_table(&template, records, 0.2, &mut rng);
    let keys: Vec<String> = table.headers().to_vec();
    if fault_every > 0 {
        for row in 1..=table.len() {
            for key in &keys {
                if rng.random_range(0..fault_every) == 0 {
                    let cell = table.cell_mut(row, key).expect("cell exists");
                    if cell.raw.len() > 1 {
                        cell.raw.remove(rng.random_range(0..cell.raw.len()));
                        cell.raw.push('#');
                    }
                }
            }
        }
    }
    let xlsx = write_workbook(&template, &table).expect("workbook writes");
    let tsv = serialize_delimited(&table, Separator::Tab);
    Workload { template, table, xlsx, tsv }
}

/// Random lowercase word pairs for distance benchmarks.
pub fn word_pairs(count: usize, max_len: usize, seed: u64) -> Vec<(String, String)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let word = |rng: &mut StdRng| -> String {
        let len = rng.random_range(1..=max_len);
        (0..len).map(|_| rng.random_range(b'a'..=b'z') as char).collect()
    };
    (0..count).map(|_| (word(&mut rng), word(&mut rng))).collect()
}
