//! Writes a table and a threshold function to JSON files and reads them back.

use monolab::func::{BitTableFunction, FunctionFile, LtfSpec};

fn main() -> monolab::Result<()> {
    let dir = std::env::temp_dir().join("monolab-example");
    std::fs::create_dir_all(&dir)?;
    let files = [
        (
            "majority.json",
            FunctionFile::Table(BitTableFunction::majority(5)?),
        ),
        (
            "ltf.json",
            FunctionFile::Ltf(LtfSpec::from_integers(&[2, -1, 1], 0)?),
        ),
    ];
    for (name, file) in &files {
        let path = dir.join(name);
        file.save(&path)?;
        let back = FunctionFile::load(&path)?;
        assert_eq!(back.to_table()?, file.to_table()?);
        println!(
            "{}: {}",
            path.display(),
            std::fs::read_to_string(&path)?.trim()
        );
    }
    Ok(())
}
