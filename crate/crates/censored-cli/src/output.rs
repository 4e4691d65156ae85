//! Output plumbing: the header block, comma-separated rows, and the
//! stdout-or-file writer.
//!
//! Every run prints, in order:
//!
//! 1. `# censored <version>`;
//! 2. one `# key = value` line per effective config value (defaults
//!    included), in alphabetical key order;
//! 3. a `# columns = ...` line naming the row fields;
//! 4. the comma-separated data rows;
//! 5. optionally a `#`-prefixed report trailer of further `key = value`
//!    lines.
//!
//! All floats are printed with Rust's shortest round-trip `Display` form, so
//! identical runs are byte-identical.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Destination for the run's table: stdout or a file named by the `output`
/// config key.
pub struct Sink {
    w: Box<dyn Write>,
}

impl Sink {
    pub fn stdout() -> Sink {
        Sink {
            w: Box::new(BufWriter::new(io::stdout())),
        }
    }

    pub fn file(path: &Path) -> io::Result<Sink> {
        Ok(Sink {
            w: Box::new(BufWriter::new(File::create(path)?)),
        })
    }

    pub fn for_target(target: &str) -> io::Result<Sink> {
        if target == "stdout" {
            Ok(Sink::stdout())
        } else {
            Sink::file(Path::new(target))
        }
    }

    /// Header block: version line plus the alphabetical config echo.
    pub fn header(&mut self, echo: &BTreeMap<String, String>) -> io::Result<()> {
        writeln!(self.w, "# censored {}", env!("CARGO_PKG_VERSION"))?;
        for (k, v) in echo {
            writeln!(self.w, "# {k} = {v}")?;
        }
        Ok(())
    }

    pub fn columns(&mut self, names: &[&str]) -> io::Result<()> {
        writeln!(self.w, "# columns = {}", names.join(", "))
    }

    /// One comma-separated data row from preformatted cells.
    pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
        writeln!(self.w, "{}", cells.join(", "))
    }

    /// One `# key = value` report line.
    pub fn report_line(&mut self, key: &str, value: impl AsRef<str>) -> io::Result<()> {
        writeln!(self.w, "# {key} = {}", value.as_ref())
    }

    pub fn flush(&mut self) -> io::Result<()> {
        self.w.flush()
    }
}
