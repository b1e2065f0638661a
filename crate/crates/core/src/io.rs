//! CSV serialization for the crate's data carriers.
//!
//! Three tidy, plotter-friendly formats, all comma-separated with a header
//! row and LF line endings:
//!
//! * signals — `t,v` (time in seconds, value); the time step is inferred from
//!   the first two rows on read and the whole column is checked uniform to
//!   1 ppm of the step,
//! * monotone curves — `x,y`,
//! * reflection spectra — `f_hz,re,im,group_delay_s`, the delay column left
//!   empty when no delay has been attached.
//!
//! Values are written in shortest round-trip form, so a write/read cycle
//! reproduces every sample bit for bit.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::num::{as_f64, lit, Real};
use crate::signals::UniformSignal;

use crate::extraction::ReflectionSpectrum;
use crate::synthesis::MonotoneCurve;

/// Largest tolerated deviation of a time stamp from the uniform grid,
/// relative to the inferred step.
const GRID_UNIFORMITY: f64 = 1e-6;

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path)?;
    Ok(csv::WriterBuilder::new().from_writer(BufWriter::new(file)))
}

fn csv_reader(path: &Path) -> Result<csv::Reader<BufReader<File>>> {
    let file = File::open(path)?;
    Ok(csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(file)))
}

fn format_error(path: &Path, message: impl Into<String>) -> Error {
    Error::format(path.display().to_string(), message)
}

/// Checks the header row against the expected column names (whitespace
/// around names is tolerated).
fn expect_header(
    path: &Path,
    reader: &mut csv::Reader<BufReader<File>>,
    expected: &[&str],
) -> Result<()> {
    let headers = reader
        .headers()
        .map_err(|e| format_error(path, e.to_string()))?;
    let got: Vec<&str> = headers.iter().map(str::trim).collect();
    if got != expected {
        return Err(format_error(
            path,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

/// Parses one float field, reporting the 1-based line and column on failure.
fn parse_field(path: &Path, record: &csv::StringRecord, index: usize, name: &str) -> Result<f64> {
    let line = record.position().map_or(0, |p| p.line());
    let raw = record
        .get(index)
        .ok_or_else(|| format_error(path, format!("line {line}: missing `{name}` column")))?;
    raw.trim().parse::<f64>().map_err(|_| {
        format_error(
            path,
            format!("line {line}: `{name}` is not a number: `{raw}`"),
        )
    })
}

/// Fails unless the record has exactly `n` fields.
fn expect_width(path: &Path, record: &csv::StringRecord, n: usize) -> Result<()> {
    if record.len() != n {
        let line = record.position().map_or(0, |p| p.line());
        return Err(format_error(
            path,
            format!("line {line}: expected {n} fields, found {}", record.len()),
        ));
    }
    Ok(())
}

/// Writes a signal as `t,v` rows.
pub fn write_signal_csv<T: Real>(path: impl AsRef<Path>, signal: &UniformSignal<T>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv_writer(path)?;
    writer
        .write_record(["t", "v"])
        .map_err(|e| format_error(path, e.to_string()))?;
    for (i, &v) in signal.samples().iter().enumerate() {
        let t = as_f64(signal.time_at(i));
        writer
            .write_record([format!("{t:?}"), format!("{:?}", as_f64(v))])
            .map_err(|e| format_error(path, e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a `t,v` signal, inferring the time step from the first two rows and
/// requiring the stamps to stay within 1 ppm of that step across the file.
pub fn read_signal_csv<T: Real>(path: impl AsRef<Path>) -> Result<UniformSignal<T>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    expect_header(path, &mut reader, &["t", "v"])?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format_error(path, e.to_string()))?;
        expect_width(path, &record, 2)?;
        times.push(parse_field(path, &record, 0, "t")?);
        values.push(parse_field(path, &record, 1, "v")?);
    }
    if times.len() < 2 {
        return Err(format_error(
            path,
            format!(
                "a signal needs at least 2 rows to fix its time step; got {}",
                times.len()
            ),
        ));
    }
    let t0 = times[0];
    let dt = times[1] - times[0];
    if !(dt.is_finite() && dt > 0.0) {
        return Err(format_error(
            path,
            format!("time stamps must increase; first step is {dt} s"),
        ));
    }
    for (i, &t) in times.iter().enumerate() {
        let expected = t0 + i as f64 * dt;
        if ((t - expected) / dt).abs() > GRID_UNIFORMITY {
            return Err(format_error(
                path,
                format!(
                    "row {} breaks the uniform grid: t = {t}, expected {expected} \
                     (step {dt} s inferred from the first two rows)",
                    i + 1
                ),
            ));
        }
    }
    let samples = values.into_iter().map(lit::<T>).collect();
    UniformSignal::with_origin(samples, lit(dt), lit(t0))
}

/// Writes a monotone curve as `x,y` rows.
pub fn write_curve_csv<T: Real>(path: impl AsRef<Path>, curve: &MonotoneCurve<T>) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv_writer(path)?;
    writer
        .write_record(["x", "y"])
        .map_err(|e| format_error(path, e.to_string()))?;
    for (&x, &y) in curve.xs().iter().zip(curve.ys()) {
        writer
            .write_record([format!("{:?}", as_f64(x)), format!("{:?}", as_f64(y))])
            .map_err(|e| format_error(path, e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads an `x,y` curve; the monotonicity requirements are the curve
/// constructor's.
pub fn read_curve_csv<T: Real>(path: impl AsRef<Path>) -> Result<MonotoneCurve<T>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    expect_header(path, &mut reader, &["x", "y"])?;
    let mut samples: Vec<(T, T)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format_error(path, e.to_string()))?;
        expect_width(path, &record, 2)?;
        let x = parse_field(path, &record, 0, "x")?;
        let y = parse_field(path, &record, 1, "y")?;
        samples.push((lit(x), lit(y)));
    }
    MonotoneCurve::new(&samples)
}

/// Writes a reflection spectrum as `f_hz,re,im,group_delay_s` rows; the delay
/// column is empty when the spectrum carries none.
pub fn write_spectrum_csv<T: Real>(
    path: impl AsRef<Path>,
    spectrum: &ReflectionSpectrum<T>,
) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv_writer(path)?;
    writer
        .write_record(["f_hz", "re", "im", "group_delay_s"])
        .map_err(|e| format_error(path, e.to_string()))?;
    for (i, (&f, s)) in spectrum
        .frequencies()
        .iter()
        .zip(spectrum.s11())
        .enumerate()
    {
        let delay = spectrum
            .group_delay()
            .map_or(String::new(), |d| format!("{:?}", as_f64(d[i])));
        writer
            .write_record([
                format!("{:?}", as_f64(f)),
                format!("{:?}", as_f64(s.re)),
                format!("{:?}", as_f64(s.im)),
                delay,
            ])
            .map_err(|e| format_error(path, e.to_string()))?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads an `f_hz,re,im,group_delay_s` spectrum. The delay column must be
/// either filled on every row or empty on every row.
pub fn read_spectrum_csv<T: Real>(path: impl AsRef<Path>) -> Result<ReflectionSpectrum<T>> {
    let path = path.as_ref();
    let mut reader = csv_reader(path)?;
    expect_header(path, &mut reader, &["f_hz", "re", "im", "group_delay_s"])?;
    let mut frequencies: Vec<T> = Vec::new();
    let mut s11: Vec<Complex<T>> = Vec::new();
    let mut delays: Vec<T> = Vec::new();
    let mut blanks = 0usize;
    for record in reader.records() {
        let record = record.map_err(|e| format_error(path, e.to_string()))?;
        expect_width(path, &record, 4)?;
        frequencies.push(lit(parse_field(path, &record, 0, "f_hz")?));
        s11.push(Complex::new(
            lit(parse_field(path, &record, 1, "re")?),
            lit(parse_field(path, &record, 2, "im")?),
        ));
        if record.get(3).is_some_and(|s| s.trim().is_empty()) {
            blanks += 1;
        } else {
            delays.push(lit(parse_field(path, &record, 3, "group_delay_s")?));
        }
    }
    let group_delay = match (blanks, delays.len()) {
        (_, 0) => None,
        (0, _) => Some(delays),
        (b, d) => {
            return Err(format_error(
                path,
                format!(
                    "the group_delay_s column must be all filled or all empty; \
                     found {d} filled and {b} empty rows"
                ),
            ));
        }
    };
    ReflectionSpectrum::new(frequencies, s11, group_delay)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::io::Write as _;

    fn temp_path(dir: &tempfile::TempDir, name: &str) -> std::path::PathBuf {
        dir.path().join(name)
    }

    fn write_text(path: &Path, text: &str) {
        let mut f = File::create(path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
    }

    #[test]
    fn signal_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = temp_path(&dir, "signal.csv");
        let samples: Vec<f64> = (0..257)
            .map(|i| (i as f64 * 0.739).sin() * 1.3e-2 + 7.7e-5)
            .collect();
        let signal = UniformSignal::with_origin(samples, 2.5e-12, 1.0e-9).unwrap();
        write_signal_csv(&path, &signal).unwrap();
        let back: UniformSignal<f64> = read_signal_csv(&path).unwrap();
        assert_eq!(back.samples(), signal.samples());
        assert_eq!(back.t0(), signal.t0());
        assert_relative_eq!(back.dt(), signal.dt(), max_relative = 1e-12);
        assert!(back.same_grid(&signal));
    }

    #[test]
    fn signal_csv_is_plain_lf_text() {
        let dir = tempfile::tempdir().unwrap();
        let path = temp_path(&dir, "signal.csv");
        let signal = UniformSignal::new(vec![1.0f64, 2.0, 3.0], 1e-9).unwrap();
        write_signal_csv(&path, &signal).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "t,v\n0.0,1.0\n1e-9,2.0\n2e-9,3.0\n");
    }

    #[test]
    fn signal_reader_rejects_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let check = |name: &str, text: &str, needle: &str| {
            let path = temp_path(&dir, name);
            write_text(&path, text);
            match read_signal_csv::<f64>(&path) {
                Err(err) => {
                    let msg = err.to_string();
                    assert!(
                        msg.contains(needle) && msg.contains(name),
                        "{name}: wanted `{needle}` in `{msg}`"
                    );
                }
                Ok(_) => panic!("{name}: expected a format error"),
            }
        };
        check("header.csv", "time,volt\n0,1\n1,2\n", "expected header");
        check("short.csv", "t,v\n0,1\n", "at least 2 rows");
        check("text.csv", "t,v\n0,1\noops,2\n", "line 3");
        check("ragged.csv", "t,v\n0,1\n1,2,3\n", "3 fields");
        check("jitter.csv", "t,v\n0,1\n1e-9,2\n2.5e-9,3\n", "uniform grid");
        check("backwards.csv", "t,v\n1e-9,1\n0,2\n", "must increase");
    }

    #[test]
    fn curve_round_trips_bitwise() {
        let dir = tempfile::tempdir().unwrap();
        let path = temp_path(&dir, "curve.csv");
        let samples: Vec<(f64, f64)> = (1..=9)
            .map(|i| {
                let x = 0.1 * i as f64;
                (x, (-7.3 * x).exp())
            })
            .collect();
        let curve = MonotoneCurve::new(&samples).unwrap();
        write_curve_csv(&path, &curve).unwrap();
        let back: MonotoneCurve<f64> = read_curve_csv(&path).unwrap();
        assert_eq!(back.xs(), curve.xs());
        assert_eq!(back.ys(), curve.ys());
    }

    #[test]
    fn curve_reader_rejects_bad_data() {
        let dir = tempfile::tempdir().unwrap();
        let path = temp_path(&dir, "flat.csv");
        write_text(&path, "x,y\n0,1\n1,1\n2,1\n");
        assert!(read_curve_csv::<f64>(&path).is_err());
        let path = temp_path(&dir, "head.csv");
        write_text(&path, "a,b\n0,1\n1,2\n2,3\n");
        assert!(read_curve_csv::<f64>(&path).is_err());
    }

    #[test]
    fn spectrum_round_trips_with_and_without_delay() {
        let dir = tempfile::tempdir().unwrap();
        let frequencies: Vec<f64> = (0..32).map(|i| 1e9 + 1e7 * i as f64).collect();
        let s11: Vec<Complex<f64>> = (0..32)
            .map(|i| Complex::from_polar(0.97, 0.11 * i as f64))
            .collect();
        let delay: Vec<f64> = (0..32).map(|i| 1e-10 / (1.0 + i as f64)).collect();

        let with =
            ReflectionSpectrum::new(frequencies.clone(), s11.clone(), Some(delay.clone())).unwrap();
        let path = temp_path(&dir, "with.csv");
        write_spectrum_csv(&path, &with).unwrap();
        let back: ReflectionSpectrum<f64> = read_spectrum_csv(&path).unwrap();
        assert_eq!(back.frequencies(), with.frequencies());
        assert_eq!(back.s11(), with.s11());
        assert_eq!(back.group_delay().unwrap(), delay.as_slice());

        let without = ReflectionSpectrum::new(frequencies, s11, None).unwrap();
        let path = temp_path(&dir, "without.csv");
        write_spectrum_csv(&path, &without).unwrap();
        let back: ReflectionSpectrum<f64> = read_spectrum_csv(&path).unwrap();
        assert!(back.group_delay().is_none());
    }

    #[test]
    fn spectrum_reader_rejects_mixed_delay_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = temp_path(&dir, "mixed.csv");
        write_text(
            &path,
            "f_hz,re,im,group_delay_s\n1e9,1,0,1e-10\n1.01e9,1,0,\n1.02e9,1,0,2e-10\n",
        );
        match read_spectrum_csv::<f64>(&path) {
            Err(err) => assert!(err.to_string().contains("all filled or all empty")),
            Ok(_) => panic!("expected a format error"),
        }
    }

    #[test]
    fn missing_file_is_an_io_error() {
        match read_signal_csv::<f64>("/nonexistent/nowhere.csv") {
            Err(Error::Io(_)) => {}
            other => panic!("expected io error, got {other:?}"),
        }
    }
}
