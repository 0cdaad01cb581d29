// Shapes mirror the estimate service's JSON bodies verbatim.

export interface ProfileState {
  sex: "female" | "male";
  smoker: boolean;
  pregnancies: number;
  msm: boolean;
  prostate_screening: boolean;
}

export interface PerDiseaseRisk {
  disease_id: string;
  display_name: string;
  occasions: number;
  estimate: number;
  se: number | null;
}

export interface EstimateMetadata {
  dataset_version: string;
  schedule_version: string;
  iterations: number | null;
  seed: number | null;
  backend: string | null;
  extrapolated: boolean;
}

export interface EstimateResponse {
  total: { estimate: number; se: number | null };
  per_disease: PerDiseaseRisk[];
  metadata: EstimateMetadata;
}

export const DEFAULT_PROFILE: ProfileState = {
  sex: "female",
  smoker: false,
  pregnancies: 0,
  msm: false,
  prostate_screening: false,
};
