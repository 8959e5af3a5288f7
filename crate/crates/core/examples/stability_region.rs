use consensus_lab::region::{default_grid, stability_region, SweepOptions};
use consensus_lab::ProtocolGains;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gains = ProtocolGains::new(1.0, 1.0)?;
    let start = std::time::Instant::now();
    let region = stability_region(&gains, &default_grid(), &SweepOptions::default())?;
    print!("{}", region.to_csv());
    println!(
        "{} solver iterations in {:.1?}",
        region.total_iterations,
        start.elapsed()
    );
    Ok(())
}
