#![no_main]

use dde_resolvent::io::{format_value, read_csv, read_series, write_pairs};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(table) = read_csv(data) {
        for row in &table.rows {
            assert_eq!(row.len(), table.header.len());
            assert!(row.iter().all(|v| v.is_finite()));
        }
    }
    if let Ok((t, u)) = read_series(data) {
        let mut buf = Vec::new();
        write_pairs(&mut buf, ["t", "u"], &t, &u).unwrap();
        let (t2, u2) = read_series(buf.as_slice()).unwrap();
        for (a, b) in u.iter().zip(&u2).chain(t.iter().zip(&t2)) {
            assert_eq!(format_value(*a), format_value(*b));
        }
    }
});
