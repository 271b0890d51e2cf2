pub mod oracles;
pub mod vecabi_checks;
