use std::fmt;
use std::path::Path;

/// Exit codes: 0 success, 1 proved-theorem violation, 2 usage or input
/// error, 3 resource cap.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(linext_core::Error),
    Io(String),
    TheoremViolation(usize),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::TheoremViolation(_) => 1,
            CliError::Core(e) if e.is_cap() => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::TheoremViolation(k) => write!(f, "{k} proved-inequality check(s) failed"),
        }
    }
}

impl From<linext_core::Error> for CliError {
    fn from(e: linext_core::Error) -> Self {
        CliError::Core(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use linext_core::Error;

    #[test]
    fn codes() {
        assert_eq!(CliError::TheoremViolation(1).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::Core(Error::Parse { line: 3, message: "m".into() }).exit_code(), 2);
        assert_eq!(CliError::Core(Error::IdealCapExceeded { cap: 1 }).exit_code(), 3);
        assert_eq!(CliError::Core(Error::EnumCapExceeded { count: "9".into(), cap: 1 }).exit_code(), 3);
    }
}
