import pytest
from click.testing import CliRunner

from gridseg.commands.cmd_eval import evaluate
from gridseg.commands.cmd_predict import predict
from gridseg.imaging.io import load_image, save_image
from gridseg.nn.init import build_model
from gridseg.nn.serialization import save_model
from gridseg.utils.io import read_csv


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def model_file(temp_dir):
    path = temp_dir / 'tiny.gseg'
    save_model(build_model(2, 1, seed=0), path)
    return path


class TestPredict:
    def test_full_resolution_map(self, runner, model_file, square_pair, temp_dir):
        img, _ = square_pair
        save_image(img, temp_dir / 'sq.png')
        result = runner.invoke(predict, ['--model', str(model_file), str(temp_dir / 'sq.png'),
                                         '--n', '48', '--out', str(temp_dir / 'pred'), '--save-grid'])
        assert result.exit_code == 0, result.output
        saliency = load_image(temp_dir / 'pred' / 'sq.saliency.png')
        assert saliency.shape == (48, 64) and saliency.channels == 1
        assert (temp_dir / 'pred' / 'sq.labels.pgm').exists()

    def test_corrupt_model(self, runner, square_pair, temp_dir):
        img, _ = square_pair
        save_image(img, temp_dir / 'sq.png')
        (temp_dir / 'bad.gseg').write_bytes(b'GSEG' + b'\x00' * 40)
        result = runner.invoke(predict, ['--model', str(temp_dir / 'bad.gseg'), str(temp_dir / 'sq.png'),
                                         '--out', str(temp_dir / 'pred')])
        assert result.exit_code == 4

    def test_ground_truth_stub_rejected(self, runner, square_pair, temp_dir):
        img, _ = square_pair
        save_image(img, temp_dir / 'sq.png')
        result = runner.invoke(predict, ['--model', 'stub:gt', str(temp_dir / 'sq.png'), '--out', str(temp_dir)])
        assert result.exit_code == 2


class TestEval:
    def test_single_model(self, runner, tiny_dataset, temp_dir):
        out = temp_dir / 'eval'
        result = runner.invoke(evaluate, ['--model', 'stub:gt', '--manifest', str(tiny_dataset),
                                          '--n', '48', '--out', str(out)])
        assert result.exit_code == 0, result.output
        assert len(read_csv(out / 'report.csv')) == 3
        assert len(read_csv(out / 'pr.csv')) == 256

    def test_several_models_with_plots(self, runner, tiny_dataset, model_file, temp_dir):
        out = temp_dir / 'eval'
        result = runner.invoke(evaluate, [
            '--model', 'stub:gt', '--model', 'stub:const=0.5', '--model', str(model_file),
            '--manifest', str(tiny_dataset), '--n', '48', '--out', str(out), '--plots',
        ])
        assert result.exit_code == 0, result.output
        assert (out / 'stub_gt-report.csv').exists()
        assert (out / 'stub_const=0.5-pr.csv').exists()
        assert (out / 'tiny-report.csv').exists()
        summary = read_csv(out / 'summary.csv')
        assert [row['model'] for row in summary] == ['stub:gt', 'stub:const=0.5', 'tiny']
        assert summary[2]['parameters'] == str(build_model(2, 1, seed=0).count_parameters())
        assert float(summary[0]['fbeta']) > float(summary[1]['fbeta'])
        assert '<svg' in (out / 'pr.svg').read_text()
        assert (out / 'fbeta.svg').exists()

    def test_vote_mode(self, runner, tiny_dataset, temp_dir):
        result = runner.invoke(evaluate, ['--model', 'stub:gt', '--manifest', str(tiny_dataset), '--mode', 'vote',
                                          '--n', '24', '--n', '36', '--n', '48', '--out', str(temp_dir / 'v')])
        assert result.exit_code == 0, result.output
        rows = read_csv(temp_dir / 'v' / 'report.csv')
        assert all(0.0 <= float(r['mae']) <= 1.0 for r in rows)

    def test_unknown_stub(self, runner, tiny_dataset, temp_dir):
        result = runner.invoke(evaluate, ['--model', 'stub:magic', '--manifest', str(tiny_dataset),
                                          '--n', '48', '--out', str(temp_dir / 'e')])
        assert result.exit_code == 2
