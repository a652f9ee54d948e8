//! Automatic cinematography for equirectangular 360° video.
//!
//! Object tracks go in, a camera path comes out: the [`director`] cuts the
//! timeline into shots, builds candidate framings per shot type, scores them
//! against object saliency and continuity rules and keeps the best one. The
//! [`renderer`] turns the resulting path into flat perspective frames.

pub mod config;
pub mod director;
pub mod geometry;
pub mod hypotheses;
pub mod measures;
pub mod path;
pub mod renderer;
pub mod saliency;
pub mod synth;
pub mod tracks;

pub use config::DirectorConfig;
pub use director::{direct, DirectorOutput, Shot};
pub use geometry::{Direction, EquirectBBox, Viewport};
pub use hypotheses::{ShotHypothesis, ShotType};
pub use tracks::{FrameRange, ObjectTrack, Scene};
