use std::fs::{self, File};
use std::io::{BufWriter, IsTerminal, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::CliError;
use crate::check::Check;

/// 17 significant digits, scientific.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("cannot create {}: {e}", dir.display())))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Output(format!("{}: {e}", path.display()))
}

/// Writes a CSV through `body`, which receives a buffered writer after the
/// header row.
pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(io(&path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{header}").map_err(io(&path))?;
    body(&mut w).map_err(io(&path))?;
    w.flush().map_err(io(&path))?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text).map_err(io(&path))?;
    Ok(path)
}

fn colored() -> bool {
    std::env::var_os("NO_COLOR").map_or(true, |v| v.is_empty()) && std::io::stdout().is_terminal()
}

pub fn print_check(c: &Check) {
    let line = c.line();
    if colored() && c.tolerance.is_finite() {
        let code = if c.pass { "32" } else { "31" };
        let (head, rest) = line.split_at(4);
        println!("\x1b[{code}m{head}\x1b[0m{rest}");
    } else {
        println!("{line}");
    }
}
