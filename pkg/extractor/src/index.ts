export { Activation, Layer, Model, ModelError, argmax, forward, inputWidth, loadModel, parseModel } from './model';
export { DatasetError, Sample, readDataset } from './dataset';
export { ExtractionSpec, extract } from './extract';
