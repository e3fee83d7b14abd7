import django.core.validators
import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='BenchmarkRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('config', models.JSONField(default=dict, help_text='Sweep config document as read from --config')),
                ('master_seed', models.DecimalField(decimal_places=0, help_text='Unsigned 64-bit master seed', max_digits=20)),
                ('record_count', models.PositiveIntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'verbose_name': 'Benchmark Run',
                'verbose_name_plural': 'Benchmark Runs',
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='BenchmarkRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('dist', models.CharField(help_text='Distribution label, e.g. gaussian', max_length=32)),
                ('d', models.PositiveSmallIntegerField(validators=[django.core.validators.MinValueValidator(1)])),
                ('alpha', models.FloatField(validators=[django.core.validators.MinValueValidator(0.0), django.core.validators.MaxValueValidator(0.5)])),
                ('epsilon', models.FloatField(validators=[django.core.validators.MinValueValidator(0.0)])),
                ('n', models.PositiveBigIntegerField(help_text='Samples drawn for this trial')),
                ('seed', models.DecimalField(decimal_places=0, max_digits=20)),
                ('success', models.BooleanField(default=False, help_text='||mu_hat - mu|| <= epsilon')),
                ('runtime_ms', models.FloatField(default=0.0)),
                ('score', models.FloatField(blank=True, help_text='Winning tournament score', null=True)),
                ('adversary', models.TextField(help_text='Compact adversary JSON')),
                ('skipped', models.BooleanField(default=False)),
                ('skip_reason', models.TextField(blank=True)),
                ('run', models.ForeignKey(blank=True, null=True, on_delete=django.db.models.deletion.CASCADE, related_name='records', to='harness.benchmarkrun')),
            ],
            options={
                'verbose_name': 'Benchmark Record',
                'verbose_name_plural': 'Benchmark Records',
                'ordering': ['dist', 'd', 'alpha', 'epsilon', 'n', 'seed'],
                'indexes': [models.Index(fields=['run', 'epsilon'], name='harness_record_run_eps_idx')],
            },
        ),
    ]
