pub mod chi;
pub mod cli;
pub mod cones;
pub mod dynamics;
pub mod linalg;
pub mod lp;
pub mod maxchi;
pub mod model;
pub mod parser;
pub mod rational;
pub mod report;
