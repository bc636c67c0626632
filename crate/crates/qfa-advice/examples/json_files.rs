//! Machine and advice files: serialize a fixture to the JSON interchange
//! format, reload it, and confirm the round trip is lossless. The same files
//! drive the `qfa` command-line tool.

use qfa_advice::schema::{fixture_files, to_report_json, AdviceFile, MachineFile};
use qfa_advice::Result;

fn main() -> Result<()> {
    let (machine_file, advice_file) = fixture_files("L_a", 4)?;
    let machine_json = to_report_json(&machine_file)?;
    let advice_json = to_report_json(&advice_file)?;
    println!(
        "L_a fixture serializes to {} bytes (machine) + {} bytes (advice)",
        machine_json.len(),
        advice_json.len()
    );

    let reloaded: MachineFile = serde_json::from_str(&machine_json)?;
    let machine = reloaded.to_machine()?;
    let round_trip = MachineFile::from_machine(&machine);
    assert_eq!(
        serde_json::to_value(&reloaded)?,
        serde_json::to_value(&round_trip)?,
        "machine file round trip is not stable"
    );

    let advice_reloaded: AdviceFile = serde_json::from_str(&advice_json)?;
    advice_reloaded.to_advice()?;
    println!("round trip through parse → build → serialize is byte-stable");

    // A short excerpt of the machine file.
    for line in machine_json.lines().take(8) {
        println!("  {line}");
    }
    println!("  ...");
    Ok(())
}
