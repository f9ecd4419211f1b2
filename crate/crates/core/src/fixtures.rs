//! Small reference datasets used by tests, examples, and the CLI golden files.

use crate::data::{Dataset, DmuRecord};

/// Nine units, one constant input, two outputs.
pub fn worked_example() -> Dataset {
    let rows: [(&str, f64, f64, f64); 9] = [
        ("A", 1.0, 2.0, 9.0),
        ("B", 1.0, 6.0, 8.0),
        ("C", 1.0, 9.0, 6.0),
        ("D", 1.0, 10.5, 3.0),
        ("1", 1.0, 3.5, 1.5),
        ("2", 1.0, 6.5, 6.5),
        ("3", 1.0, 8.5, 1.5),
        ("4", 1.0, 5.0, 4.0),
        ("5", 1.0, 3.0, 5.0),
    ];
    let dmus = rows
        .iter()
        .map(|&(id, x, y1, y2)| DmuRecord::new(id, vec![x], vec![y1, y2]))
        .collect();
    Dataset::new(vec!["x1".into()], vec!["y1".into(), "y2".into()], dmus)
        .expect("worked example is valid")
}

/// The same data as [`worked_example`] in the CLI's CSV schema.
pub const WORKED_EXAMPLE_CSV: &str = "\
id,in:x1,out:y1,out:y2
A,1,2,9
B,1,6,8
C,1,9,6
D,1,10.5,3
1,1,3.5,1.5
2,1,6.5,6.5
3,1,8.5,1.5
4,1,5,4
5,1,3,5
";

/// Four universities with two inputs and four outputs (parsing fixture only).
pub const UNIVERSITIES_CSV: &str = "\
id,in:ASTAFF,in:EXPEND,out:ARTICLES,out:%Q1,out:INCOMES,out:THESIS
UCA,1392.5,10923.17,2546,48.23,1247.917,518
ULPGC,1352.9,11720.77,2584,44.35,1360.731,425
USAL,1917.6,16105.84,5485,49.77,1928.015,1121
UCAR,1455.4,12564.66,6016,41.16,2138.44,465
";
