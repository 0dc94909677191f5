use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radar::{GestureRecord, RadarConfig};
use crate::scene::{mix_seed, synthesize_cube, GestureClass, GestureTemplate, Jitter, SimNoise, SubjectProfile, Trajectory};

/// Identity and RNG stream of one synthetic recording.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordSpec {
    pub class: GestureClass,
    pub subject: u8,
    pub repetition: u32,
    pub seed: u64,
}

/// A lazily rendered dataset: full recordings are large, so callers render
/// one record at a time through [`DatasetPlan::render`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetPlan {
    pub config: RadarConfig,
    pub noise: SimNoise,
    pub seed: u64,
    pub duration: f64,
    pub records: Vec<RecordSpec>,
}

pub fn plan_dataset(
    templates: &[GestureTemplate],
    subjects: u8,
    repetitions: u32,
    config: &RadarConfig,
    noise: &SimNoise,
    seed: u64,
) -> Result<DatasetPlan> {
    if subjects < 2 {
        return Err(Error::Validation("need at least 2 subjects".into()));
    }
    if repetitions < 1 {
        return Err(Error::Validation("need at least 1 repetition".into()));
    }
    config.validate()?;
    let mut records = Vec::with_capacity(templates.len() * subjects as usize * repetitions as usize);
    for t in templates {
        for subject in 0..subjects {
            for repetition in 0..repetitions {
                records.push(RecordSpec {
                    class: t.class,
                    subject,
                    repetition,
                    seed: mix_seed(&[seed, t.class.id() as u64, subject as u64, repetition as u64]),
                });
            }
        }
    }
    Ok(DatasetPlan {
        config: config.clone(),
        noise: *noise,
        seed,
        duration: 2.0,
        records,
    })
}

impl DatasetPlan {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn profile(&self, subject: u8) -> SubjectProfile {
        SubjectProfile::draw(self.seed, subject)
    }

    /// Ground-truth scatterer motion of record `index`.
    pub fn trajectory(&self, index: usize) -> Result<Trajectory> {
        let spec = self.records[index];
        let frames = self.config.frames_for(self.duration);
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let jitter = Jitter::draw(&mut rng);
        GestureTemplate::new(spec.class).trajectory(&self.config, frames, &self.profile(spec.subject), &jitter)
    }

    /// Renders record `index`; depends only on the plan and the index.
    pub fn render(&self, index: usize) -> Result<GestureRecord> {
        let spec = self.records[index];
        let traj = self.trajectory(index)?;
        let noise_seed = mix_seed(&[spec.seed, self.profile(spec.subject).noise_seed]);
        let cube = synthesize_cube(&traj, &self.config, &self.noise, noise_seed)?;
        GestureRecord::new(cube.quantized_f32(), spec.class.id(), spec.subject)
    }
}

/// Renders every record of the plan. Order and content do not depend on
/// thread scheduling.
pub fn generate_dataset(
    templates: &[GestureTemplate],
    subjects: u8,
    repetitions: u32,
    config: &RadarConfig,
    noise: &SimNoise,
    seed: u64,
) -> Result<Vec<GestureRecord>> {
    let plan = plan_dataset(templates, subjects, repetitions, config, noise, seed)?;
    (0..plan.len()).into_par_iter().map(|i| plan.render(i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_per_class() {
        let plan = plan_dataset(&GestureTemplate::all(), 8, 30, &RadarConfig::default(), &SimNoise::default(), 1).unwrap();
        assert_eq!(plan.len(), 2400);
        for c in GestureClass::ALL {
            assert_eq!(plan.records.iter().filter(|r| r.class == c).count(), 240);
        }
    }

    #[test]
    fn small_dataset_has_distinct_subjects() {
        let tpl = [GestureTemplate::new(GestureClass::Forward)];
        let recs = generate_dataset(&tpl, 2, 1, &RadarConfig::default(), &SimNoise::default(), 3).unwrap();
        assert_eq!(recs.len(), 2);
        assert_ne!(recs[0].subject, recs[1].subject);
        assert_eq!(recs[0].cube.frames(), 60);
    }

    #[test]
    fn same_seed_same_bits() {
        let tpl = [GestureTemplate::new(GestureClass::CircleCw), GestureTemplate::new(GestureClass::FingerRub)];
        let a = generate_dataset(&tpl, 2, 1, &RadarConfig::default(), &SimNoise::default(), 11).unwrap();
        let b = generate_dataset(&tpl, 2, 1, &RadarConfig::default(), &SimNoise::default(), 11).unwrap();
        assert_eq!(a, b);
        let plan = plan_dataset(&tpl, 2, 1, &RadarConfig::default(), &SimNoise::default(), 11).unwrap();
        // rendering out of order gives the same record
        assert_eq!(plan.render(3).unwrap(), a[3]);
    }

    #[test]
    fn rejects_single_subject() {
        assert!(plan_dataset(&GestureTemplate::all(), 1, 1, &RadarConfig::default(), &SimNoise::default(), 0).is_err());
    }
}
