//! Flat perspective frames from equirectangular sources, and binary PPM I/O.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::geometry::{direction_to_equirect_pixel, unproject_from_viewport, Viewport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PpmError {
    #[error("bad magic number, expected P6")]
    BadMagic,
    #[error("malformed header at byte {offset}: {message}")]
    BadHeader { offset: usize, message: String },
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u64),
    #[error("truncated payload: data ends at byte {offset}, expected {expected} bytes")]
    Truncated { offset: usize, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("output {out_w}x{out_h} does not match viewport aspect {aspect}")]
    AspectMismatch { out_w: usize, out_h: usize, aspect: f64 },
    #[error("source image is empty")]
    EmptySource,
    #[error("output size must be positive")]
    BadOutputSize,
    #[error("{frames} source frames for a {path}-frame camera path")]
    CountMismatch { frames: usize, path: usize },
    #[error("frame {index}: {message}")]
    Frame { index: usize, message: String },
}

/// Row-major 8-bit RGB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl Image {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Option<Self> {
        (width.checked_mul(height)?.checked_mul(3)? == pixels.len()).then_some(Self { width, height, pixels })
    }

    pub fn filled(width: usize, height: usize, rgb: [u8; 3]) -> Self {
        Self {
            width,
            height,
            pixels: rgb.repeat(width * height),
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [u8; 3]) -> Self {
        let mut pixels = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                pixels.extend_from_slice(&f(x, y));
            }
        }
        Self { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }
}

struct HeaderReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl HeaderReader<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u64, PpmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(&b) = self.data.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(b - b'0')))
                .ok_or_else(|| PpmError::BadHeader {
                    offset: start,
                    message: format!("{what} overflows"),
                })?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(PpmError::BadHeader {
                offset: start,
                message: format!("expected {what}"),
            });
        }
        Ok(value)
    }
}

/// Decodes a binary (P6) PPM with maxval 255. Bytes after the pixel payload
/// are ignored.
pub fn read_ppm(data: &[u8]) -> Result<Image, PpmError> {
    if data.len() < 2 || &data[..2] != b"P6" {
        return Err(PpmError::BadMagic);
    }
    let mut r = HeaderReader { data, pos: 2 };
    let width = r.number("width")?;
    let height = r.number("height")?;
    let maxval = r.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(PpmError::BadHeader {
            offset: r.pos,
            message: format!("zero dimension {width}x{height}"),
        });
    }
    if maxval != 255 {
        return Err(PpmError::UnsupportedMaxval(maxval));
    }
    match data.get(r.pos) {
        Some(b) if b.is_ascii_whitespace() => r.pos += 1,
        _ => {
            return Err(PpmError::BadHeader {
                offset: r.pos,
                message: "expected a single whitespace byte before the payload".into(),
            })
        }
    }
    let too_big = || PpmError::BadHeader {
        offset: r.pos,
        message: format!("dimensions {width}x{height} are too large"),
    };
    let len = usize::try_from(width)
        .ok()
        .zip(usize::try_from(height).ok())
        .and_then(|(w, h)| w.checked_mul(h)?.checked_mul(3))
        .ok_or_else(too_big)?;
    let expected = r.pos.checked_add(len).ok_or_else(too_big)?;
    if data.len() < expected {
        return Err(PpmError::Truncated {
            offset: data.len(),
            expected,
        });
    }
    Ok(Image {
        width: width as usize,
        height: height as usize,
        pixels: data[r.pos..expected].to_vec(),
    })
}

/// Canonical P6 encoding: `P6\n<w> <h>\n255\n` followed by the pixels.
pub fn write_ppm(img: &Image) -> Vec<u8> {
    let header = format!("P6\n{} {}\n255\n", img.width, img.height);
    let mut out = Vec::with_capacity(header.len() + img.pixels.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(&img.pixels);
    out
}

/// Bilinear sample at continuous pixel coordinates (pixel centers at +0.5),
/// wrapping horizontally and clamping vertically.
fn sample_bilinear(src: &Image, px: f64, py: f64) -> [u8; 3] {
    let (w, h) = (src.width as i64, src.height as i64);
    let sx = px - 0.5;
    let sy = (py - 0.5).clamp(0.0, (h - 1) as f64);
    let x0 = sx.floor();
    let y0 = sy.floor();
    let fx = sx - x0;
    let fy = sy - y0;
    let xa = (x0 as i64).rem_euclid(w) as usize;
    let xb = (x0 as i64 + 1).rem_euclid(w) as usize;
    let ya = y0 as usize;
    let yb = (y0 as i64 + 1).min(h - 1) as usize;
    let (p00, p10, p01, p11) = (src.get(xa, ya), src.get(xb, ya), src.get(xa, yb), src.get(xb, yb));
    let mut out = [0u8; 3];
    for c in 0..3 {
        let top = p00[c] as f64 + (p10[c] as f64 - p00[c] as f64) * fx;
        let bottom = p01[c] as f64 + (p11[c] as f64 - p01[c] as f64) * fx;
        out[c] = (top + (bottom - top) * fy).round().clamp(0.0, 255.0) as u8;
    }
    out
}

/// Renders the perspective view `vp` of an equirectangular `src`.
pub fn render_viewport(src: &Image, vp: &Viewport, out_w: usize, out_h: usize) -> Result<Image, RenderError> {
    if src.width == 0 || src.height == 0 {
        return Err(RenderError::EmptySource);
    }
    if out_w == 0 || out_h == 0 {
        return Err(RenderError::BadOutputSize);
    }
    if ((out_w as f64 / out_h as f64) / vp.aspect() - 1.0).abs() > 0.01 {
        return Err(RenderError::AspectMismatch {
            out_w,
            out_h,
            aspect: vp.aspect(),
        });
    }
    let (sw, sh) = (src.width as f64, src.height as f64);
    let mut pixels = vec![0u8; out_w * out_h * 3];
    pixels.par_chunks_mut(out_w * 3).enumerate().for_each(|(row, line)| {
        let v = (row as f64 + 0.5) / out_h as f64;
        for col in 0..out_w {
            let u = (col as f64 + 0.5) / out_w as f64;
            let d = unproject_from_viewport(u, v, vp);
            let (px, py) = direction_to_equirect_pixel(&d, sw, sh).expect("source dimensions checked");
            line[col * 3..col * 3 + 3].copy_from_slice(&sample_bilinear(src, px, py));
        }
    });
    Ok(Image {
        width: out_w,
        height: out_h,
        pixels,
    })
}

pub trait FrameSource {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn frame(&mut self, index: usize) -> Result<Image, RenderError>;
}

pub trait FrameSink {
    fn put(&mut self, index: usize, image: &Image) -> Result<(), RenderError>;
}

impl FrameSource for Vec<Image> {
    fn len(&self) -> usize {
        <[Image]>::len(self)
    }

    fn frame(&mut self, index: usize) -> Result<Image, RenderError> {
        self.get(index).cloned().ok_or(RenderError::Frame {
            index,
            message: "no such frame".into(),
        })
    }
}

impl FrameSink for Vec<Image> {
    fn put(&mut self, _index: usize, image: &Image) -> Result<(), RenderError> {
        self.push(image.clone());
        Ok(())
    }
}

pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.ppm")
}

/// `frame_000000.ppm`, `frame_000001.ppm`, ... in a directory. The frame
/// count is the length of the unbroken run starting at 0.
pub struct DirFrameSource {
    dir: PathBuf,
    count: usize,
}

impl DirFrameSource {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, RenderError> {
        let dir = dir.as_ref().to_path_buf();
        if !dir.is_dir() {
            return Err(RenderError::Frame {
                index: 0,
                message: format!("{} is not a directory", dir.display()),
            });
        }
        let count = (0..).take_while(|&i| dir.join(frame_file_name(i)).is_file()).count();
        Ok(Self { dir, count })
    }
}

impl FrameSource for DirFrameSource {
    fn len(&self) -> usize {
        self.count
    }

    fn frame(&mut self, index: usize) -> Result<Image, RenderError> {
        let path = self.dir.join(frame_file_name(index));
        let bytes = fs::read(&path).map_err(|e| RenderError::Frame {
            index,
            message: format!("{}: {e}", path.display()),
        })?;
        read_ppm(&bytes).map_err(|e| RenderError::Frame {
            index,
            message: format!("{}: {e}", path.display()),
        })
    }
}

pub struct DirFrameSink {
    dir: PathBuf,
}

impl DirFrameSink {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self, RenderError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| RenderError::Frame {
            index: 0,
            message: format!("{}: {e}", dir.display()),
        })?;
        Ok(Self { dir })
    }
}

impl FrameSink for DirFrameSink {
    fn put(&mut self, index: usize, image: &Image) -> Result<(), RenderError> {
        let path = self.dir.join(frame_file_name(index));
        fs::write(&path, write_ppm(image)).map_err(|e| RenderError::Frame {
            index,
            message: format!("{}: {e}", path.display()),
        })
    }
}

/// Renders every frame of `source` through the matching viewport of `path`.
pub fn render_sequence(
    source: &mut dyn FrameSource,
    path: &[Viewport],
    out_w: usize,
    out_h: usize,
    sink: &mut dyn FrameSink,
) -> Result<usize, RenderError> {
    if source.len() != path.len() {
        return Err(RenderError::CountMismatch {
            frames: source.len(),
            path: path.len(),
        });
    }
    for (i, vp) in path.iter().enumerate() {
        let src = source.frame(i)?;
        let out = render_viewport(&src, vp, out_w, out_h).map_err(|e| match e {
            RenderError::Frame { .. } => e,
            other => RenderError::Frame {
                index: i,
                message: other.to_string(),
            },
        })?;
        sink.put(i, &out)?;
    }
    Ok(path.len())
}
