//! Library half of the `matchwelfare` command: file formats, the run and
//! sweep drivers, and the executable claim suite behind `verify`.

pub mod claims;
pub mod commands;
pub mod io;
pub mod sweep;
