pub mod graph;
pub mod hypfun;
pub mod indices;
pub mod pipeline;
pub mod realize;
pub mod stats;
pub mod volume;
