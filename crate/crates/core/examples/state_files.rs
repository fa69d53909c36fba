//! State files on disk and the command-line entry point, driven in-process.

use ebit::cli::{run, StateFile};
use ebit::states::{max_entangled, random_density};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("ebit-state-files-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;

    let bell = StateFile::from_operator(max_entangled(2)?.operator());
    print!("{}", bell.to_json());
    let rho = StateFile::from_operator(random_density(2, 2, 3, 9)?.operator());
    let rho_path = dir.join("rho.json");
    std::fs::write(&rho_path, rho.to_json())?;

    let text = std::fs::read_to_string(&rho_path)?;
    let parsed = StateFile::parse(&text)?;
    println!("re-serialized identically: {}", parsed.to_json() == text);

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let args = ["ebit", "rains", rho_path.to_str().unwrap(), "--eps", "0.1"];
    let code = run(args, &mut out, &mut err);
    println!("ebit rains exited {code}:");
    print!("{}", String::from_utf8(out)?);

    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(["ebit", "gen-state", "isotropic", "--d", "3", "--fidelity", "0.8"], &mut out, &mut err);
    println!("ebit gen-state exited {code}, {} bytes", out.len());

    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
