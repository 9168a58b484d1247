//! Prints the growth table of the benevolent family as CSV, followed by the
//! log-log slope of steps against nodes.
//!
//! ```text
//! cargo run --release --example growth_stats -- 2 4 8 16
//! ```

use minproc::stats::{growth_slope, growth_table, write_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rs: Vec<u32> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    if rs.is_empty() {
        rs = vec![2, 4, 8, 16];
    }
    let rows = growth_table(&rs, 1)?;
    write_csv(std::io::stdout(), &rows)?;
    if let Some(s) = growth_slope(&rows) {
        eprintln!("log-log slope of steps vs n: {s:.4}");
    }
    Ok(())
}
