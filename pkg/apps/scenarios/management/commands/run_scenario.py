from pathlib import Path
import logging

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from apps.common.conf import get_setting
from apps.common.exceptions import InputFileError, SwitchLabError, diagnostic
from apps.scenarios.parsers import parse_scenario
from apps.scenarios.registry import run_scenario
from apps.scenarios.reports import render_diagnostic, render_report

logger = logging.getLogger(__name__)


class Command(BaseCommand):
    help = 'Exécute un scénario (fichier JSON) et écrit le rapport JSON'

    def add_arguments(self, parser):
        parser.add_argument(
            '--scenario',
            type=str,
            default=str(Path(get_setting('SCENARIO_DIR')) / 'teleport.json'),
            help='Le chemin vers le fichier de scénario',
        )
        parser.add_argument('--out', type=str, default=None, help='Fichier de sortie du rapport (stdout par défaut)')
        parser.add_argument('--seed', type=int, default=None, help='Remplace la graine du fichier')
        parser.add_argument('--shots', type=int, default=None, help='Remplace le nombre de coups du fichier')
        parser.add_argument('--tol', type=float, default=None, help='Remplace la tolérance du fichier')

    def fail(self, exc, verbosity):
        """Affiche le diagnostic structuré et arrête la commande."""
        details = diagnostic(exc)
        logger.error(f"Échec du scénario : {details['message']}", exc_info=verbosity >= 2)
        self.stderr.write(self.style.ERROR(render_diagnostic(details)), ending='')
        raise CommandError(f"{details['kind']}: {details['message']}")

    def handle(self, *args, **options):
        file_path = options['scenario']
        verbosity = options['verbosity']

        logger.info(f"Lecture du scénario : {file_path}")
        try:
            text = Path(file_path).read_text(encoding='utf-8')
        except OSError as e:
            self.fail(InputFileError(f"Le fichier '{file_path}' est illisible : {e.strerror}", file_path), verbosity)

        try:
            spec = parse_scenario(text)
            if options['seed'] is not None and options['seed'] < 0:
                raise ValidationError("--seed doit être positif", code='invalid_value', params={'field': 'seed'})
            if options['shots'] is not None and options['shots'] < 0:
                raise ValidationError("--shots doit être positif", code='invalid_value', params={'field': 'shots'})
            if options['tol'] is not None and not 0 < options['tol'] < 1:
                raise ValidationError("--tol doit être dans ]0, 1[", code='invalid_value', params={'field': 'tolerance'})
            spec = spec.with_overrides(seed=options['seed'], shots=options['shots'], tolerance=options['tol'])
            result = run_scenario(spec, progress=verbosity >= 1)
            report = render_report(result)
        except (ValidationError, SwitchLabError, ValueError, KeyError) as e:
            self.fail(e, verbosity)

        if options['out']:
            try:
                Path(options['out']).write_text(report, encoding='utf-8')
            except OSError as e:
                self.fail(InputFileError(f"Écriture impossible dans '{options['out']}' : {e.strerror}", options['out']), verbosity)
            if verbosity >= 1:
                self.stderr.write(self.style.SUCCESS(f"Rapport écrit dans {options['out']}"))
        else:
            self.stdout.write(report, ending='')

        if verbosity >= 1:
            style = self.style.SUCCESS if result.passed else self.style.WARNING
            verdict = 'tous les verdicts sont positifs' if result.passed else 'au moins un verdict en échec'
            self.stderr.write(style(f"Scénario {spec.scenario} : {verdict}"))
